import numpy as np
import pytest

from laplacefit import DistributionSpec, Sample, derive_substream, sample_spec


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def draw_sample(spec_text: str, n: int, seed: int = 7) -> Sample:
    spec = DistributionSpec.parse(spec_text)
    return Sample.from_values(sample_spec(spec, derive_substream(seed), size=n))
