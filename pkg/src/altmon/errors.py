"""Exception types raised across the package."""


class AltmonError(Exception):
    """Base class for all package errors."""


class InputError(AltmonError):
    """Problem with user-supplied input data (maps to CLI exit code 2)."""


class SchemaViolation(InputError):
    def __init__(self, line_no, field, detail=""):
        self.line_no = line_no
        self.field = field
        self.detail = detail
        msg = f"line {line_no}: invalid field {field!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class AllViewsMissing(InputError):
    def __init__(self, channel_id):
        self.channel_id = channel_id
        super().__init__(f"channel {channel_id!r} has no video with a view count")


class DuplicateChannelMeta(InputError):
    def __init__(self, channel_id):
        self.channel_id = channel_id
        super().__init__(f"channel {channel_id!r} appears more than once in channel metadata")


class NoHost(AltmonError):
    def __init__(self, url):
        self.url = url
        super().__init__(f"no host in {url!r}")


class NoSeedForCategory(AltmonError):
    def __init__(self, category):
        self.category = category
        super().__init__(f"no seed present in the graph for category {category}")


class ShapeMismatch(AltmonError):
    pass


class EmptyCorpus(AltmonError):
    pass


class MissingMetric(AltmonError):
    def __init__(self, channel_id, metric):
        self.channel_id = channel_id
        self.metric = metric
        super().__init__(f"channel {channel_id!r} has no value for {metric}")


class InvalidCounts(AltmonError, ValueError):
    pass


class EmptySample(AltmonError, ValueError):
    pass


class LengthMismatch(AltmonError, ValueError):
    pass


class NotFound(AltmonError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "not found"


class MissingArtifact(InputError):
    def __init__(self, path, stage):
        self.path = path
        self.stage = stage
        super().__init__(f"stage {stage!r} needs missing artifact {path}")


class ClassTooSmall(UserWarning):
    """A validation sample was truncated because the class has too few domains."""
