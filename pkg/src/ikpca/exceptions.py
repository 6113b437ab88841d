"""Exception types raised by :mod:`ikpca`."""


class RankDeficiencyError(ValueError):
    """Requested more components than the data's numerical rank supports."""

    def __init__(self, requested, effective_rank):
        self.requested = requested
        self.effective_rank = effective_rank
        super().__init__(
            f"requested {requested} components but the effective rank is "
            f"{effective_rank}"
        )


class InsufficientPeaksError(ValueError):
    """Too few R-peaks to cut interior beats."""


class FormatError(ValueError):
    """A data file or model container could not be parsed."""
