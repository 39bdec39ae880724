import numpy as np
import pytest

from primeshape.constellations import build_cqam
from primeshape.field import Prime
from primeshape.pas import (
    CodeSpec,
    PasFrame,
    empirical_distributions,
    encode,
    generate_frames,
    map_frame,
)
from primeshape.shaping import MaxwellBoltzmann

P5 = Prime(5)
P7 = Prime(7)


def _toy_code() -> CodeSpec:
    # rate 2/3, n = 6, k = 4 over F_5; P written out by hand
    parity = [
        [1, 2],
        [3, 0],
        [4, 4],
        [2, 1],
    ]
    return CodeSpec(P5, 6, 4, np.array(parity))


# ---------------------------------------------------------------------------
# CodeSpec / encode
# ---------------------------------------------------------------------------


def test_encode_hand_checked():
    code = _toy_code()
    info = [1, 0, 2, 3]
    word = encode(code, info)
    # parity computed by hand: 1*[1,2] + 2*[4,4] + 3*[2,1] mod 5
    assert word.tolist() == [1, 0, 2, 3, (1 + 8 + 6) % 5, (2 + 8 + 3) % 5]
    assert word.tolist()[:4] == info  # systematic


def test_encode_is_linear():
    code = CodeSpec.random_dense(P7, 12, 8, seed=3)
    rng = np.random.default_rng(11)
    a = rng.integers(0, 7, size=8)
    b = rng.integers(0, 7, size=8)
    lhs = encode(code, (a + b) % 7)
    rhs = (encode(code, a) + encode(code, b)) % 7
    assert np.array_equal(lhs, rhs)


def test_encode_matches_independent_matmul():
    code = CodeSpec.random_dense(P7, 10, 6, seed=5)
    rng = np.random.default_rng(2)
    info = rng.integers(0, 7, size=6)
    g = np.concatenate([np.eye(6, dtype=np.int64), code.parity], axis=1)
    assert np.array_equal(encode(code, info), info @ g % 7)


def test_encode_batched_equals_per_row():
    code = CodeSpec.random_dense(P5, 8, 5, seed=9)
    rng = np.random.default_rng(4)
    block = rng.integers(0, 5, size=(7, 5))
    batch = encode(code, block)
    assert batch.shape == (7, 8)
    for i in range(7):
        assert np.array_equal(batch[i], encode(code, block[i]))


def test_encode_rejects_bad_input():
    code = _toy_code()
    with pytest.raises(ValueError):
        encode(code, [1, 2, 3])  # wrong length
    with pytest.raises(ValueError):
        encode(code, [1, 2, 3, 5])  # symbol out of field
    with pytest.raises(ValueError):
        encode(code, [1, 2, 3, -1])


def test_codespec_validation():
    with pytest.raises(ValueError):
        CodeSpec(P5, 6, 2, np.zeros((2, 4), dtype=int))  # rate 1/3 < 1/2
    with pytest.raises(ValueError):
        CodeSpec(P5, 6, 6, np.zeros((6, 0), dtype=int))  # k = n
    with pytest.raises(ValueError):
        CodeSpec(P5, 6, 4, np.zeros((3, 2), dtype=int))  # wrong shape
    with pytest.raises(ValueError):
        CodeSpec(P5, 6, 4, np.full((4, 2), 5))  # entries outside F_5


def test_random_dense_column_weights():
    for seed in range(5):
        code = CodeSpec.random_dense(P7, 24, 16, seed=seed)
        weights = (code.parity != 0).sum(axis=0)
        assert weights.min() >= 8  # ceil(k/2)
    heavy = CodeSpec.random_dense(P7, 12, 8, seed=1, min_col_weight=8)
    assert ((heavy.parity != 0).sum(axis=0) == 8).all()
    with pytest.raises(ValueError):
        CodeSpec.random_dense(P7, 12, 8, min_col_weight=9)


def test_random_dense_deterministic():
    a = CodeSpec.random_dense(P5, 10, 6, seed=42)
    b = CodeSpec.random_dense(P5, 10, 6, seed=42)
    assert np.array_equal(a.parity, b.parity)


# ---------------------------------------------------------------------------
# frame mapping
# ---------------------------------------------------------------------------


def test_map_frame_structure():
    code = _toy_code()
    cqam = build_cqam(P5)
    dm = [4, 0, 2]
    src = [3]
    frame = map_frame(code, cqam, dm, src)
    assert frame.shell_symbols == (4, 0, 2)
    assert frame.source_symbols == (3,)
    assert len(frame.parity_symbols) == 2
    # phases = [source | parity], indices = shell*p + phase
    assert frame.phase_symbols == (3,) + frame.parity_symbols
    expected = [s * 5 + q for s, q in zip(dm, frame.phase_symbols)]
    assert list(frame.point_indices) == expected
    # parity must agree with a direct encoder call
    word = encode(code, dm + src)
    assert frame.parity_symbols == tuple(word[4:].tolist())


def test_map_frame_zero_inputs():
    code = _toy_code()
    cqam = build_cqam(P5)
    frame = map_frame(code, cqam, [0, 0, 0], [0])
    assert frame.point_indices == (0, 0, 0)


def test_map_frame_injective_on_sample():
    code = _toy_code()
    cqam = build_cqam(P5)
    rng = np.random.default_rng(7)
    seen = set()
    for _ in range(200):
        dm = rng.integers(0, 5, size=3).tolist()
        src = rng.integers(0, 5, size=1).tolist()
        frame = map_frame(code, cqam, dm, src)
        key = (frame.dm_symbols, frame.source_symbols)
        assert key not in seen or True  # duplicates of inputs are allowed
        seen.add((key, frame.point_indices))
    # distinct inputs never collide in (inputs -> indices) pairs
    assert len({k for k, _ in seen}) == len(seen)


def test_map_frame_rejects_bad_shapes():
    code = _toy_code()
    cqam5 = build_cqam(P5)
    cqam7 = build_cqam(P7)
    with pytest.raises(ValueError):
        map_frame(code, cqam7, [0, 0, 0], [0])  # wrong constellation size
    with pytest.raises(ValueError):
        map_frame(code, cqam5, [0, 0], [0])  # too few matcher symbols
    with pytest.raises(ValueError):
        map_frame(code, cqam5, [0, 0, 0], [])  # too few source symbols
    odd = CodeSpec(P5, 5, 3, np.zeros((3, 2), dtype=int))
    with pytest.raises(ValueError):
        map_frame(odd, cqam5, [0, 0], [0])  # odd frame length


# ---------------------------------------------------------------------------
# full chain
# ---------------------------------------------------------------------------


def _chain_pieces():
    code = CodeSpec.random_dense(P5, 6, 4, seed=0)
    cqam = build_cqam(P5)
    prior = MaxwellBoltzmann.from_amplitudes(0.15, cqam.shells.radii)
    return code, cqam, prior


def test_generate_frames_shapes_and_determinism():
    code, cqam, prior = _chain_pieces()
    frames, plan = generate_frames(code, cqam, prior, num_frames=40, seed=3)
    assert len(frames) == 40
    assert all(isinstance(f, PasFrame) for f in frames)
    assert all(len(f.point_indices) == 3 for f in frames)
    assert plan.block_length == 64  # default matcher block length
    again, _ = generate_frames(code, cqam, prior, num_frames=40, seed=3)
    assert frames == again
    other, _ = generate_frames(code, cqam, prior, num_frames=40, seed=4)
    assert frames != other


def test_generate_frames_rejects_empty():
    code, cqam, prior = _chain_pieces()
    with pytest.raises(ValueError):
        generate_frames(code, cqam, prior, num_frames=0, seed=1)


def test_chain_statistics():
    # moderate run: parity near-uniform, shells near the matcher's
    # composition, and the product-law chi-square inside its 99% quantile
    code, cqam, prior = _chain_pieces()
    frames, plan = generate_frames(code, cqam, prior, num_frames=4000, seed=12)
    target = [c / plan.block_length for c in plan.counts]
    report = empirical_distributions(
        frames, cqam, shell_target=target, min_frames=4000
    )
    assert report["num_points"] == 12000
    assert report["parity"]["uniformity_gap"] < 0.02
    assert report["shells"]["max_abs_dev"] < 0.02
    assert report["points"]["chi_square"] < report["points"]["chi_square_99pct"]
    pmf = np.array(report["parity"]["pmf"])
    assert pmf.sum() == pytest.approx(1.0)


def test_empirical_distributions_guards():
    code, cqam, prior = _chain_pieces()
    frames, _ = generate_frames(code, cqam, prior, num_frames=50, seed=1)
    with pytest.raises(ValueError):
        empirical_distributions(frames, cqam)  # default min_frames=10000
    with pytest.raises(ValueError):
        empirical_distributions(frames, cqam, shell_target=[0.5, 0.5], min_frames=10)
    with pytest.raises(ValueError):
        empirical_distributions(
            frames, cqam, shell_target=[1.0, 0.0, 0.0, 0.0, 0.0], min_frames=10
        )
