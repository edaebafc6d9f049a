"""Hypothesis strategies built on the seeded generators."""

from hypothesis import strategies as st

from dglab import generators as gen

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def valid_dgla(draw, max_dim=5):
    return gen.random_valid_dgla(gen.rng_for(draw(seeds)), max_dim)


@st.composite
def candidate(draw, max_dim=5):
    return gen.random_candidate(gen.rng_for(draw(seeds)), max_dim)


@st.composite
def morphism(draw, max_dim=4):
    return gen.random_morphism(gen.rng_for(draw(seeds)), max_dim)


@st.composite
def injective_morphism(draw, max_dim=4):
    return gen.random_injective_morphism(gen.rng_for(draw(seeds)), max_dim)


@st.composite
def rational_matrix(draw, max_rows=5, max_cols=5):
    from dglab.linalg import q, qzeros

    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    m = qzeros(r, c)
    for i in range(r):
        for j in range(c):
            num = draw(st.integers(-3, 3))
            den = draw(st.sampled_from([1, 1, 1, 2, 3]))
            m[i, j] = q(num) / den
    return m


@st.composite
def complex_(draw, max_dim=5):
    rng = gen.rng_for(draw(seeds))
    degs = gen.random_degrees(rng, rng.randint(1, max_dim), -1, 2)
    return gen.random_complex(rng, degs)
