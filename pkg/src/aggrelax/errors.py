"""Exception types shared across the solver modules."""


class InvalidParameter(ValueError):
    """A configuration or input value is outside its admissible range."""


class CFLViolation(InvalidParameter):
    def __init__(self, ratio: float, limit: float = 1.0):
        self.ratio = ratio
        super().__init__(f"CFL ratio c*dt/dx = {ratio!r} exceeds {limit}")


class SubcharacteristicViolation(InvalidParameter):
    def __init__(self, c: float, a_inf: float):
        self.c = c
        self.a_inf = a_inf
        super().__init__(f"subcharacteristic condition violated: c = {c} < a_inf = {a_inf}")


class ConvergenceFailure(RuntimeError):
    """The interface-velocity fixed point did not reach its tolerance."""

    def __init__(self, iterations, distance, previous, last):
        self.iterations = iterations
        self.distance = distance
        self.previous = previous
        self.last = last
        super().__init__(
            f"fixed point not converged after {iterations} iterations "
            f"(last distance {distance:.3e})"
        )


class SchemeFailure(RuntimeError):
    """A time step failed; carries where in the run it happened."""

    def __init__(self, step: int, time: float, cause: Exception):
        self.step = step
        self.time = time
        self.cause = cause
        super().__init__(f"step {step} at t = {time:.6g} failed: {cause}")
