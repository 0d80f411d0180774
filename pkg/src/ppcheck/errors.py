"""Exception hierarchy.

Every failure raised by the library derives from :class:`PpcheckError`, so
callers (the CLI, the batch runner) can tell operational errors apart from
programming bugs.
"""

from sklearn.exceptions import NotFittedError


class PpcheckError(Exception):
    """Base class for all library errors."""


class ConfigError(PpcheckError):
    """Invalid or missing configuration (e.g. no models and no oracle mode)."""


# mapping store

class MappingError(PpcheckError):
    pass


class MalformedMapping(MappingError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class DuplicateKey(MappingError):
    def __init__(self, key, section=None):
        self.key = key
        self.section = section
        loc = f" in {section!r}" if section else ""
        super().__init__(f"duplicate key {key!r}{loc}")


# app packages

class PackageError(PpcheckError):
    pass


class MissingFile(PackageError):
    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"missing file: {self.path}")


class MalformedXml(PackageError):
    def __init__(self, message, position=None, source=None):
        self.message = message
        self.position = position
        self.source = source
        parts = [message]
        if position is not None:
            parts.append(f"at offset {position}")
        if source:
            parts.append(f"in {source}")
        super().__init__(" ".join(parts))


class DuplicatePermission(PackageError):
    def __init__(self, permission):
        self.permission = permission
        super().__init__(f"permission declared twice: {permission}")


class DanglingScreenRef(PackageError):
    def __init__(self, screen_id, where=None):
        self.screen_id = screen_id
        msg = f"reference to unknown screen {screen_id!r}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)


class DuplicateScreen(PackageError):
    def __init__(self, screen_id):
        self.screen_id = screen_id
        super().__init__(f"screen defined twice: {screen_id!r}")


class MalformedBehavior(PackageError):
    pass


# device simulator

class OffScreenError(PpcheckError):
    """The app is in the background; there is no current page."""


# text models

class ModelError(PpcheckError):
    pass


class EmptyCorpus(ModelError):
    pass


class SingleClass(ModelError):
    def __init__(self, task=None):
        self.task = task
        msg = "training data contains a single class"
        if task:
            msg = f"task {task!r}: {msg}"
        super().__init__(msg)


class NonFiniteLoss(ModelError):
    pass


class UntrainedModel(ModelError, NotFittedError):
    pass


class MalformedModel(ModelError):
    pass
