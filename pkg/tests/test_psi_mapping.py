import json

import pytest
from hypothesis import given, strategies as st

from ppcheck.errors import DuplicateKey, MalformedMapping
from ppcheck.psi_mapping import (PsiKind, dump_mapping, load_mapping, parse_mapping,
                                 psi_for_permission)

K = PsiKind


def test_27_kinds_in_four_families():
    assert len(PsiKind) == 27
    assert {k.family for k in PsiKind} == {"contact", "demographic", "identifier", "location"}
    coarse = [k for k in PsiKind if k.coarse]
    assert sorted(map(str, coarse)) == ["contact_information", "demographic_information",
                                        "identifier_information", "location_information"]
    for k in PsiKind:
        assert k.family_coarse.coarse and k.family_coarse.family == k.family


def test_read_phone_state_row_loads_and_resolves():
    doc = {"aliases": {"IMEI": "identifier_imei", "Phone Number": "contact_phone_number"},
           "permissions": {"READ_PHONE_STATE": [{"psi": "IMEI", "api": "getDeviceId()"},
                                                {"psi": "Phone Number", "api": "getLine1Number()"}]}}
    store = parse_mapping(json.dumps(doc))
    assert store.psi_for_permission("READ_PHONE_STATE") == {K.identifier_imei, K.contact_phone_number}
    assert store.apis_for(["READ_PHONE_STATE"], []) == {
        ("READ_PHONE_STATE", "getDeviceId()", K.identifier_imei),
        ("READ_PHONE_STATE", "getLine1Number()", K.contact_phone_number)}


def test_empty_document_is_empty_store():
    store = parse_mapping("")
    assert store.permission_names == frozenset()
    assert store.psi_for_permission("READ_CONTACTS") == frozenset()


def test_duplicate_permission_block_rejected():
    text = ('{"permissions": {"ACCESS_WIFI_STATE": [{"psi": "identifier_mac", "api": "a"}],'
            ' "ACCESS_WIFI_STATE": [{"psi": "identifier_mac", "api": "b"}]}}')
    with pytest.raises(DuplicateKey) as exc:
        parse_mapping(text)
    assert exc.value.key == "ACCESS_WIFI_STATE"


def test_duplicate_api_within_owner_rejected():
    text = '{"libraries": {"X": [{"api": "a", "psi": "identifier_mac"}, {"api": "a", "psi": "identifier_imei"}]}}'
    with pytest.raises(DuplicateKey):
        parse_mapping(text)


@pytest.mark.parametrize("text, field", [
    ('{"permissions": {"P": [{"psi": "Unknown Thing", "api": "a"}]}}', "permissions.P"),
    ('{"permissions": {"P": []}}', "permissions.P"),
    ('{"permissions": {"P": [{"psi": "identifier_mac"}]}}', "permissions.P[0]"),
    ('{"aliases": {"X": "not_a_kind"}}', "aliases.X"),
    ('{"extra": {}}', "extra"),
])
def test_malformed_documents_name_the_field(text, field):
    with pytest.raises(MalformedMapping) as exc:
        parse_mapping(text)
    assert exc.value.field == field


def test_syntax_error_reports_line():
    with pytest.raises(MalformedMapping) as exc:
        parse_mapping('{\n "permissions": {\n  "P": [,]\n }\n}')
    assert exc.value.line == 3


def test_bundled_store_rows(store):
    assert psi_for_permission(store, "READ_PHONE_STATE") == {K.identifier_imei, K.contact_phone_number}
    assert store.psi_for_permission("ACCESS_WIFI_STATE") == {K.identifier_mac, K.identifier_SSID_BSSID}
    assert store.psi_for_permission("VIBRATE") == frozenset()
    assert ("InMobi", "setAge", K.demographic_age) in store.apis_for([], ["InMobi"])
    assert ("ACCESS_FINE_LOCATION", "getLocation()", K.location_gps) in store.apis_for(
        ["ACCESS_FINE_LOCATION"], [])
    assert store.apis_for([], []) == frozenset()


def test_bundled_store_covers_the_results_tables(store):
    perms = {"ACCESS_FINE_LOCATION", "ACCESS_COARSE_LOCATION", "READ_PHONE_STATE",
             "ACCESS_WIFI_STATE", "READ_CONTACTS", "GET_ACCOUNTS", "CAMERA", "RECORD_AUDIO",
             "READ_EXTERNAL_STORAGE", "READ_CALENDAR", "READ_SMS", "RECEIVE_SMS", "CALL_PHONE",
             "READ_CALL_LOG"}
    assert perms <= store.permission_names
    libs = {"Google Ads", "Google Firebase Analytics", "Google Analytics", "Facebook Analytics",
            "Flurry", "Unity3d Ads", "AppLovin", "InMobi"}
    assert libs == store.library_names
    assert len(store.apis_for([], ["InMobi"])) == 13


def test_dump_and_reload_is_identity(store):
    text = dump_mapping(store)
    again = parse_mapping(text)
    assert again == store
    assert dump_mapping(again) == text


labels = st.sampled_from([k.value for k in PsiKind])
names = st.text(st.characters(min_codepoint=65, max_codepoint=90), min_size=1, max_size=8)
rows = st.lists(st.tuples(st.text("abcdefg()", min_size=1, max_size=6), labels),
                min_size=1, max_size=4, unique_by=lambda r: r[0])


@given(st.dictionaries(names, rows, max_size=4), st.dictionaries(names, rows, max_size=3))
def test_roundtrip_property(perms, libs):
    doc = {"permissions": {p: [{"psi": l, "api": a} for a, l in r] for p, r in perms.items()},
           "libraries": {n: [{"api": a, "psi": l} for a, l in r] for n, r in libs.items()}}
    store = parse_mapping(json.dumps(doc))
    assert parse_mapping(dump_mapping(store)) == store
    # apis_for is the union of the per-owner lookups
    union = frozenset()
    for p in perms:
        union |= store.apis_for([p], [])
    for n in libs:
        union |= store.apis_for([], [n])
    assert store.apis_for(list(perms), list(libs)) == union


def test_load_from_path(tmp_path, store):
    path = tmp_path / "m.json"
    path.write_text(dump_mapping(store))
    assert load_mapping(path) == store
