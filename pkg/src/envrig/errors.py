"""Exception hierarchy shared by all envrig modules."""


class EnvrigError(Exception):
    """Base class for every error raised by the framework."""


class ValidationError(EnvrigError):
    """An input violated a declared contract (bad action, bad dimensions, bad config)."""


class ConfigError(ValidationError):
    """A RuntimeConfig field violated its invariants."""


class EnvClosedError(EnvrigError):
    """Operation on an environment after close()."""


class ResetRequiredError(EnvrigError):
    """step() called before reset(), or after the episode terminated."""


class UnknownEnvError(EnvrigError):
    """Environment id is not in the registry."""

    def __init__(self, env_id: str, known: list[str]):
        self.env_id = env_id
        self.known = list(known)
        super().__init__(
            f"unknown env id {env_id!r}; registered: {', '.join(self.known)}"
        )


class JointNotFoundError(EnvrigError):
    """A joint name did not resolve on the robot."""

    def __init__(self, name: str, known: tuple[str, ...]):
        self.name = name
        super().__init__(f"unknown joint {name!r}; known joints: {', '.join(known)}")


class ControlModeError(EnvrigError):
    """An actuation call did not match the joint's configured control mode."""


class NotSupportedError(EnvrigError):
    """Interface surface that is declared but intentionally unimplemented."""


class UnsupportedArchetypeError(EnvrigError):
    """RobotModel topology is not one of the closed-form dynamics archetypes."""


class DivergenceError(EnvrigError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, state=None):
        self.state = state
        super().__init__(message)


class ClockRegressionError(EnvrigError):
    """A ClockSource reported time moving backwards (fatal contract violation)."""


class DumpFormatError(EnvrigError):
    """A trajectory dump could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
