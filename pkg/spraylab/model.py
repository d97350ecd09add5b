# tolerance ladder: algebraic identities, one curvature level, ξ level (two curvature levels)
IDENTITY_TOLERANCE = 1e-9
CURVATURE_TOLERANCE = 1e-7
XI_TOLERANCE = 1e-6

SEMI_BASIC_TOLERANCE = IDENTITY_TOLERANCE
HOMOGENEITY_TOLERANCE = 1e-8

# points whose fundamental tensor is worse conditioned are excluded from verdicts
EXCLUDED_CONDITION_NUMBER = 1e6

# number of seeded pseudo-random unit test-vector tuples in a residual battery
BATTERY_SIZE = 8

DEFAULT_POINTS = 100
DEFAULT_SEED = 0

# fiber scaling of sampled points, uniform in this range
FIBER_SCALE_RANGE = (0.5, 2.0)

# scalings `λ` used by the homogeneity checks
HOMOGENEITY_SCALINGS = (0.37, 2.9)

# relative residual of `F(x, λy) = λF(x, y)` for expression-level metrics
METRIC_HOMOGENEITY_TOLERANCE = 1e-10

# agreement of the coordinate connection with its bracket definition
CONNECTION_TOLERANCE = 1e-8


class Tolerances:
    """ tolerance ladder used by one run """

    def __init__(
        self,
        identity: float = IDENTITY_TOLERANCE,
        curvature: float = CURVATURE_TOLERANCE,
        xi: float = XI_TOLERANCE,
    ):
        """
        :param identity: algebraic identities
        :param curvature: quantities one curvature level deep
        :param xi: quantities at the level of the curvature 1-form, and the spread of `κ`
        """

        for name, value in (('identity', identity), ('curvature', curvature), ('xi', xi)):
            if not value > 0:
                raise ValueError(f'{name} tolerance must be positive, not {value}')
        self.identity = float(identity)
        self.curvature = float(curvature)
        self.xi = float(xi)

    def to_dict(self) -> {str: float}:
        return {'identity': self.identity, 'curvature': self.curvature, 'xi': self.xi}

    def __eq__(self, other) -> bool:
        return isinstance(other, Tolerances) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(identity={self.identity!r}, curvature={self.curvature!r}, xi={self.xi!r})'
