class SimulplanError(Exception):
    """Base class of all the errors raised by `simulplan`."""


class TerminalStateError(SimulplanError):
    """Exception raised when an operation is applied to a game state whose
    terminal status does not allow it:
    - legal actions of a terminal state
    - step from a terminal state
    - terminal reward of a non-terminal state
    - planning from a terminal root
    """

    def __init__(self, **kwargs):

        self.operation = kwargs.get("operation", "")
        self.terminal = kwargs.get("terminal", True)
        if self.terminal:
            self.msg = f"{self.operation} is undefined on a terminal state."
        else:
            self.msg = f"{self.operation} requires a terminal state."

        super().__init__(self.msg)


class IllegalActionError(SimulplanError):
    """Exception raised when a joint action holds an action that is not in
    the legal action set of the player who plays it.
    """

    def __init__(self, **kwargs):

        self.player = kwargs.get("player")
        self.action = kwargs.get("action")
        self.legal = tuple(kwargs.get("legal", ()))
        self.msg = (
            f"Player {self.player} cannot play action {repr(self.action)}. "
            f"Legal actions are {list(self.legal)}."
        )

        super().__init__(self.msg)


class DeadPlayerError(SimulplanError):
    """Exception raised when an eliminated player is asked to act."""

    def __init__(self, **kwargs):

        self.player = kwargs.get("player")
        self.msg = f"Player {self.player} has been eliminated."

        super().__init__(self.msg)


class InvalidDistributionError(SimulplanError):
    """Exception raised when an opponent policy is not a probability
    distribution over the legal actions of that opponent.
    """

    def __init__(self, **kwargs):

        self.player = kwargs.get("player")
        self.reason = kwargs.get("reason", "")
        self.msg = (
            f"Invalid policy for player {self.player}: {self.reason}."
        )

        super().__init__(self.msg)


class UnknownActionError(SimulplanError):
    """Exception raised when a bandit is updated with an action that is not
    one of its arms.
    """

    def __init__(self, **kwargs):

        self.action = kwargs.get("action")
        self.arms = tuple(kwargs.get("arms", ()))
        self.msg = (
            f"{repr(self.action)} is not an arm of this bandit. "
            f"Arms are {list(self.arms)}."
        )

        super().__init__(self.msg)


class PlanningNotRunError(SimulplanError):
    """Exception raised when the best action of a bandit is requested before
    any of its arms has been pulled.
    """

    def __init__(self, **kwargs):

        self.arms = tuple(kwargs.get("arms", ()))
        self.msg = (
            f"No arm among {list(self.arms)} has been pulled yet. "
            "Run at least one planning iteration."
        )

        super().__init__(self.msg)


class UnknownValueFunctionError(SimulplanError):
    """Exception raised when a value function identifier is not
    registered.
    """

    def __init__(self, **kwargs):

        self.value_fn = kwargs.get("value_fn")
        self.known = tuple(kwargs.get("known", ()))
        self.msg = (
            f"{repr(self.value_fn)} is not a known value function. "
            f"Use one of {', '.join(self.known)}."
        )

        super().__init__(self.msg)


class EmptyMaskError(SimulplanError):
    """Exception raised when a policy has to choose among no action."""

    def __init__(self, **kwargs):

        self.player = kwargs.get("player")
        self.msg = "The action mask is empty."
        if self.player is not None:
            self.msg = f"The action mask of player {self.player} is empty."

        super().__init__(self.msg)


class KeyCollisionError(SimulplanError):
    """Exception raised by the key audit when two different canonical
    serializations share the same 64-bit key.
    """

    def __init__(self, **kwargs):

        self.key = kwargs.get("key")
        self.msg = f"Canonical key {self.key:#018x} collides."

        super().__init__(self.msg)


class ConfigError(SimulplanError):
    """Exception raised when a run configuration cannot be parsed or holds
    a value outside of its documented range.
    """

    def __init__(self, **kwargs):

        self.path = kwargs.get("path", "")
        self.line = kwargs.get("line")
        self.column = kwargs.get("column")
        self.reason = kwargs.get("reason", "")
        location = str(self.path) if self.path else "<config>"
        if self.line is not None:
            location += f":{self.line}:{self.column}"
        self.msg = f"{location}: {self.reason}"

        super().__init__(self.msg)


class UnknownAgentSpec(ConfigError):
    """Exception raised when an agent specification string matches no
    known agent.
    """

    def __init__(self, **kwargs):

        self.spec = kwargs.pop("spec", "")
        kwargs.setdefault(
            "reason",
            f"{repr(self.spec)} is not a valid agent specification. "
            "Expected 'rule', 'random', 'follower:<checkpoint>' or "
            "'<mcs|mcts|fdts>-<ts|ucb|random>[-norollout]'.",
        )

        super().__init__(**kwargs)


class CheckpointError(SimulplanError):
    """Exception raised when a follower checkpoint cannot be read."""

    def __init__(self, **kwargs):

        self.path = kwargs.get("path", "")
        self.reason = kwargs.get("reason", "")
        self.msg = f"Invalid checkpoint {self.path}: {self.reason}."

        super().__init__(self.msg)
