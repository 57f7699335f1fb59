"""Exception hierarchy shared by every module."""


class RiccatiError(Exception):
    pass


class DivisionNearZero(RiccatiError, ZeroDivisionError):
    pass


class DomainError(RiccatiError, ValueError):
    def __init__(self, func, value):
        super().__init__(f"{func}: argument {value!r} outside the function's domain")
        self.func = func
        self.value = value


class EvalOutsideRegion(RiccatiError, ValueError):
    pass


class NotASchrodingerSolution(RiccatiError):
    pass


class NotHarmonic(RiccatiError):
    pass


class SeedNotASolution(RiccatiError):
    pass


class NotATransportSolution(RiccatiError):
    pass


class PoleOfFamily(RiccatiError):
    pass


class QuadratureFailure(RiccatiError):
    pass


class BlowUp(RiccatiError):
    def __init__(self, axis, location):
        super().__init__(f"Riccati ODE along axis {axis} blew up near x={location:.6g}")
        self.axis = axis
        self.location = location


class NodeInExcludedSet(RiccatiError):
    def __init__(self, nodes):
        nodes = [tuple(int(i) for i in n) for n in nodes]
        shown = ", ".join(map(str, nodes[:10]))
        more = "" if len(nodes) <= 10 else f" ... ({len(nodes)} total)"
        super().__init__(f"grid nodes in excluded set: {shown}{more}")
        self.nodes = nodes


class BoundaryNode(RiccatiError, IndexError):
    pass


class QueryOffNode(RiccatiError, ValueError):
    pass


class NotConverged(RiccatiError):
    def __init__(self, iterations, residual):
        super().__init__(f"CG did not converge: {iterations} iterations, relative residual {residual:.3e}")
        self.iterations = iterations
        self.residual = residual


class NonPositiveCoefficient(RiccatiError, ValueError):
    pass


class ConfigError(RiccatiError, ValueError):
    pass


class ScenarioFailure(RiccatiError):
    pass
