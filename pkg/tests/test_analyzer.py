from hypothesis import given, strategies as st

from ppcheck.analyzer import analyze
from ppcheck.app_package import AppPackage, BehaviorScript, Manifest, Screen, UiNode
from ppcheck.psi_mapping import PsiKind as K, default_store

STORE = default_store()


def pkg(perms=(), libs=()):
    return AppPackage.build(Manifest("a.b", tuple(perms)), list(libs),
                            [Screen("main", UiNode("TextView", "x"))], BehaviorScript("main"))


def test_no_permissions_no_libraries_is_clean():
    result = analyze(pkg(), STORE)
    assert result.clean and result.required_psi == frozenset()


def test_non_privacy_permissions_and_unknown_libraries_are_clean():
    result = analyze(pkg(["INTERNET", "VIBRATE"], ["OkHttp"]), STORE)
    assert result.clean
    assert result.privacy_permissions == frozenset() and result.privacy_libraries == frozenset()


def test_read_phone_state():
    result = analyze(pkg(["READ_PHONE_STATE"]), STORE)
    assert result.required_psi == {K.identifier_imei, K.contact_phone_number}
    assert result.third_party_psi == frozenset()
    assert result.monitored_methods() == {"getDeviceId()": (K.identifier_imei,),
                                          "getLine1Number()": (K.contact_phone_number,)}


def test_inmobi_only():
    result = analyze(pkg(libs=["InMobi"]), STORE)
    assert {K.demographic_age, K.location_gps} <= result.third_party_psi
    assert result.third_party_psi <= result.required_psi
    assert ("InMobi", "setAge", K.demographic_age) in result.monitored_apis


def test_psi_from_both_sources_stays_third_party():
    result = analyze(pkg(["ACCESS_FINE_LOCATION"], ["Flurry"]), STORE)
    assert K.location_gps in result.third_party_psi


@given(st.sets(st.sampled_from(sorted(STORE.permission_names) + ["INTERNET"])),
       st.sets(st.sampled_from(sorted(STORE.library_names) + ["Glide"])))
def test_surface_is_the_union_of_lookups(perms, libs):
    result = analyze(pkg(sorted(perms), sorted(libs)), STORE)
    expected = set()
    for p in perms:
        expected |= STORE.psi_for_permission(p)
    third = set()
    for lib in libs:
        third |= STORE.psi_for_library(lib)
    assert result.required_psi == expected | third
    assert result.third_party_psi == third
    assert result.clean == (not expected and not third)
    assert {psi for _, _, psi in result.monitored_apis} == expected | third
