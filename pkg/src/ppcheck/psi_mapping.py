"""PSI mapping store: which permissions and library APIs touch which PSI.

The store file is a JSON document with three top-level objects::

    {
      "aliases":     {"IMEI": "identifier_imei", ...},
      "permissions": {"READ_PHONE_STATE": [{"psi": "IMEI", "api": "getDeviceId()"}, ...]},
      "libraries":   {"InMobi": [{"api": "setAge", "psi": "Age"}, ...]}
    }

PSI labels are either one of the 27 canonical :class:`PsiKind` names or a
free-form label resolved through ``aliases``.  Key order is insignificant;
repeated keys are rejected.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from . import jsonio
from .errors import DuplicateKey, MalformedMapping


class PsiKind(str, enum.Enum):
    contact_address = "contact_address"
    contact_city = "contact_city"
    contact_email_address = "contact_email_address"
    contact_information = "contact_information"
    contact_password = "contact_password"
    contact_phone_number = "contact_phone_number"
    contact_postal = "contact_postal"
    contact_zip = "contact_zip"
    demographic_age = "demographic_age"
    demographic_gender = "demographic_gender"
    demographic_information = "demographic_information"
    identifier_ad_id = "identifier_ad_id"
    identifier_cookie = "identifier_cookie"
    identifier_device = "identifier_device"
    identifier_imei = "identifier_imei"
    identifier_imsi = "identifier_imsi"
    identifier_information = "identifier_information"
    identifier_ip_address = "identifier_ip_address"
    identifier_mac = "identifier_mac"
    identifier_sim_serial = "identifier_sim_serial"
    identifier_SSID_BSSID = "identifier_SSID_BSSID"
    location_bluetooth = "location_bluetooth"
    location_cell_tower = "location_cell_tower"
    location_gps = "location_gps"
    location_information = "location_information"
    location_ip_address = "location_ip_address"
    location_wifi = "location_wifi"

    def __str__(self):
        return self.value

    @property
    def family(self) -> str:
        return self.value.split("_", 1)[0]

    @property
    def coarse(self) -> bool:
        return self.value.endswith("_information")

    @property
    def granularity(self) -> str:
        return "coarse" if self.coarse else "fine"

    @property
    def family_coarse(self) -> "PsiKind":
        return PsiKind(f"{self.family}_information")


FAMILIES = ("contact", "demographic", "identifier", "location")


@dataclass(frozen=True)
class PermissionMapping:
    permission: str
    entries: tuple  # ((psi_label, api_method), ...)


@dataclass(frozen=True)
class LibraryMapping:
    library: str
    entries: tuple  # ((api_method, psi_label), ...)


@dataclass(frozen=True)
class MappingStore:
    """Immutable permission/library -> API -> PSI relation."""

    aliases: tuple = ()          # ((label, PsiKind), ...) sorted by label
    permissions: tuple = ()      # PermissionMapping sorted by name
    libraries: tuple = ()        # LibraryMapping sorted by name
    _perm_index: dict = field(default=None, init=False, repr=False, compare=False)
    _lib_index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_perm_index", {p.permission: p for p in self.permissions})
        object.__setattr__(self, "_lib_index", {lib.library: lib for lib in self.libraries})

    def resolve(self, label: str) -> PsiKind:
        try:
            return PsiKind(label)
        except ValueError:
            pass
        for alias, kind in self.aliases:
            if alias == label:
                return kind
        raise MalformedMapping(f"PSI label {label!r} is neither canonical nor aliased")

    @property
    def permission_names(self) -> frozenset:
        return frozenset(self._perm_index)

    @property
    def library_names(self) -> frozenset:
        return frozenset(self._lib_index)

    def has_library(self, name: str) -> bool:
        return name in self._lib_index

    def psi_for_permission(self, permission: str) -> frozenset:
        row = self._perm_index.get(permission)
        if row is None:
            return frozenset()
        return frozenset(self.resolve(label) for label, _ in row.entries)

    def psi_for_library(self, library: str) -> frozenset:
        row = self._lib_index.get(library)
        if row is None:
            return frozenset()
        return frozenset(self.resolve(label) for _, label in row.entries)

    def apis_for(self, permissions: Iterable[str] = (), libraries: Iterable[str] = ()) -> frozenset:
        """Return ``{(source, api_method, PsiKind)}`` for every matched row."""
        out = set()
        for name in permissions:
            row = self._perm_index.get(name)
            if row is not None:
                out.update((name, api, self.resolve(label)) for label, api in row.entries)
        for name in libraries:
            row = self._lib_index.get(name)
            if row is not None:
                out.update((name, api, self.resolve(label)) for api, label in row.entries)
        return frozenset(out)

    def all_psi(self) -> frozenset:
        kinds = set()
        for p in self.permissions:
            kinds |= self.psi_for_permission(p.permission)
        for lib in self.libraries:
            kinds |= self.psi_for_library(lib.library)
        return frozenset(kinds)

    def to_document(self) -> dict:
        return {
            "aliases": {label: kind.value for label, kind in self.aliases},
            "permissions": {
                p.permission: [{"psi": psi, "api": api} for psi, api in p.entries]
                for p in self.permissions
            },
            "libraries": {
                lib.library: [{"api": api, "psi": psi} for api, psi in lib.entries]
                for lib in self.libraries
            },
        }


# module-level conveniences mirroring the store methods

def psi_for_permission(store: MappingStore, permission: str) -> frozenset:
    return store.psi_for_permission(permission)


def apis_for(store: MappingStore, permissions=(), libraries=()) -> frozenset:
    return store.apis_for(permissions, libraries)


def _section(doc, name):
    value = doc.get(name, {})
    if not isinstance(value, dict):
        raise MalformedMapping(f"{name!r} must be an object", field=name)
    return value


def _entries(rows, owner, section, first, second):
    if not isinstance(rows, list) or not rows:
        raise MalformedMapping("expected a non-empty list", field=f"{section}.{owner}")
    out = []
    seen_api = set()
    for i, row in enumerate(rows):
        where = f"{section}.{owner}[{i}]"
        if not isinstance(row, dict) or set(row) != {"psi", "api"}:
            raise MalformedMapping("entry must have exactly the keys 'psi' and 'api'", field=where)
        psi, api = row["psi"], row["api"]
        if not isinstance(psi, str) or not psi or not isinstance(api, str) or not api:
            raise MalformedMapping("'psi' and 'api' must be non-empty strings", field=where)
        if api in seen_api:
            raise DuplicateKey(api, section=f"{section}.{owner}")
        seen_api.add(api)
        out.append((row[first], row[second]))
    return tuple(out)


def parse_mapping(text: str) -> MappingStore:
    if not text.strip():
        return MappingStore()
    try:
        doc = jsonio.loads_strict(text)
    except jsonio._DuplicateJsonKey as exc:
        raise DuplicateKey(exc.key) from None
    except json.JSONDecodeError as exc:
        raise MalformedMapping(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise MalformedMapping("top level must be an object", line=1)
    unknown = set(doc) - {"aliases", "permissions", "libraries"}
    if unknown:
        raise MalformedMapping(f"unknown top-level keys {sorted(unknown)}", field=sorted(unknown)[0])

    aliases = []
    for label, target in _section(doc, "aliases").items():
        try:
            aliases.append((label, PsiKind(target)))
        except ValueError:
            raise MalformedMapping(f"alias target {target!r} is not a PSI kind",
                                   field=f"aliases.{label}") from None
    aliases.sort(key=lambda pair: pair[0])

    permissions = []
    for name, rows in _section(doc, "permissions").items():
        if not name:
            raise MalformedMapping("empty permission name", field="permissions")
        permissions.append(PermissionMapping(name, _entries(rows, name, "permissions", "psi", "api")))
    permissions.sort(key=lambda p: p.permission)

    libraries = []
    for name, rows in _section(doc, "libraries").items():
        if not name:
            raise MalformedMapping("empty library name", field="libraries")
        libraries.append(LibraryMapping(name, _entries(rows, name, "libraries", "api", "psi")))
    libraries.sort(key=lambda lib: lib.library)

    store = MappingStore(tuple(aliases), tuple(permissions), tuple(libraries))
    # every label must resolve
    for p in store.permissions:
        for label, _ in p.entries:
            try:
                store.resolve(label)
            except MalformedMapping:
                raise MalformedMapping(f"unresolvable PSI label {label!r}",
                                       field=f"permissions.{p.permission}") from None
    for lib in store.libraries:
        for _, label in lib.entries:
            try:
                store.resolve(label)
            except MalformedMapping:
                raise MalformedMapping(f"unresolvable PSI label {label!r}",
                                       field=f"libraries.{lib.library}") from None
    return store


def load_mapping(path=None) -> MappingStore:
    """Load a mapping file; ``None`` loads the bundled default store."""
    if path is None:
        text = resources.files("ppcheck").joinpath("data/mapping.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_mapping(text)


def dump_mapping(store: MappingStore) -> str:
    return jsonio.dumps(store.to_document())


def default_store() -> MappingStore:
    return load_mapping(None)
