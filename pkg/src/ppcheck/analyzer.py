"""Static phase: the app's PSI surface and the API watch-list."""

from __future__ import annotations

from dataclasses import dataclass

from .app_package import AppPackage
from .psi_mapping import MappingStore


@dataclass(frozen=True)
class StaticAnalysis:
    privacy_permissions: frozenset
    privacy_libraries: frozenset
    required_psi: frozenset
    third_party_psi: frozenset
    monitored_apis: frozenset   # {(source, api_method, PsiKind)}

    @property
    def clean(self) -> bool:
        return not self.monitored_apis

    def monitored_methods(self) -> dict:
        """api_method -> sorted tuple of the PSI kinds it touches."""
        table = {}
        for _, api, psi in self.monitored_apis:
            table.setdefault(api, set()).add(psi)
        return {api: tuple(sorted(kinds, key=str)) for api, kinds in table.items()}

    def summary(self) -> dict:
        return {
            "clean": self.clean,
            "privacy_permissions": sorted(self.privacy_permissions),
            "privacy_libraries": sorted(self.privacy_libraries),
            "required_psi": sorted(str(k) for k in self.required_psi),
            "third_party_psi": sorted(str(k) for k in self.third_party_psi),
            "monitored_apis": sorted([src, api, str(psi)] for src, api, psi in self.monitored_apis),
        }


def analyze(pkg: AppPackage, store: MappingStore) -> StaticAnalysis:
    perms = frozenset(p for p in pkg.manifest.permissions if store.psi_for_permission(p))
    libs = frozenset(lib for lib in pkg.libraries if store.has_library(lib))

    first_party = set()
    for perm in perms:
        first_party |= store.psi_for_permission(perm)
    third_party = set()
    for lib in libs:
        third_party |= store.psi_for_library(lib)

    # a PSI reached by both a permission and a library still needs third-party disclosure
    return StaticAnalysis(
        privacy_permissions=perms,
        privacy_libraries=libs,
        required_psi=frozenset(first_party | third_party),
        third_party_psi=frozenset(third_party),
        monitored_apis=store.apis_for(sorted(perms), sorted(libs)),
    )
