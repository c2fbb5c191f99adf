import random
from fractions import Fraction

import pytest

from nsboxes import (
    BIPARTITIONS,
    ArityError,
    Box2,
    ToblModel,
    all_relabelings2,
    builtin,
    chsh_max,
    class4_tobl_model,
    decode_lambda,
    is_local,
    is_tobl,
    lambda_index,
    local_problem,
    mix,
    relabel,
    tobl_problem,
    verify_model,
)

SEED = 31415


def random_ns_box2(rng):
    rels = all_relabelings2()
    vertices = []
    for _ in range(rng.randrange(1, 6)):
        if rng.random() < 0.4:
            vertices.append(relabel(builtin("pr"), rng.choice(rels)))
        else:
            ta, tb = rng.randrange(4), rng.randrange(4)
            fn = lambda a, b, x, y: (
                Fraction(1)
                if a == (ta >> x) & 1 and b == (tb >> y) & 1
                else Fraction(0)
            )
            vertices.append(Box2.from_function(fn))
    raw = [Fraction(rng.randrange(1, 10)) for _ in vertices]
    total = sum(raw)
    return mix(vertices, tuple(v / total for v in raw))


def test_lambda_index_round_trip():
    rng = random.Random(SEED)
    for _ in range(100):
        solo_tt = rng.randrange(4)
        r1 = (rng.randrange(4), rng.randrange(16))
        r2 = (rng.randrange(4), rng.randrange(16))
        idx = lambda_index(solo_tt, r1, r2)
        assert 0 <= idx < 16384
        assert decode_lambda(idx) == (solo_tt, r1, r2)


def test_deterministic_boxes_are_local():
    for t in (0, 21, 47, 63):
        ta, tb, tc = (t >> 4) & 3, (t >> 2) & 3, t & 3
        cert = is_local(builtin(f"deterministic({ta},{tb},{tc})"))
        assert cert.feasible
        assert len(cert.point) == 1


def test_uniform_boxes_are_local():
    assert is_local(builtin("uniform3")).feasible
    assert is_local(builtin("uniform2")).feasible


def test_pr_is_not_local_and_certificate_verifies():
    pr = builtin("pr")
    cert = is_local(pr)
    assert not cert.feasible
    assert cert.verify(local_problem(pr))


def test_isotropic_mixture_threshold():
    # visibility t of PR against uniform noise: local exactly when
    # chsh_max = 4t <= 2, so the boundary sits at t = 1/2
    pr, noise = builtin("pr"), builtin("uniform2")
    at = mix((pr, noise), (Fraction(1, 2), Fraction(1, 2)))
    above = mix((pr, noise), (Fraction(1, 2) + Fraction(1, 100), Fraction(49, 100)))
    assert is_local(at).feasible
    assert not is_local(above).feasible


def test_local_iff_chsh_max_within_two():
    rng = random.Random(SEED + 1)
    for _ in range(60):
        box = random_ns_box2(rng)
        assert is_local(box).feasible == (chsh_max(box) <= 2)


def test_tripartite_nonlocal_builtins():
    assert not is_local(builtin("class3")).feasible
    assert not is_local(builtin("class4")).feasible
    assert not is_local(builtin("class44")).feasible


def test_class4_tobl_all_bipartitions():
    box = builtin("class4")
    for bp in BIPARTITIONS:
        cert = is_tobl(box, bp)
        assert cert.feasible, bp.name
        assert cert.verify(tobl_problem(box, bp))


def test_class44_tobl_infeasible_with_farkas():
    box = builtin("class44")
    cert = is_tobl(box, BIPARTITIONS[0])
    assert not cert.feasible
    assert cert.farkas
    assert cert.verify(tobl_problem(box, BIPARTITIONS[0]))


def test_is_tobl_rejects_bipartite_input():
    with pytest.raises(ArityError):
        is_tobl(builtin("pr"), BIPARTITIONS[0])


def test_class4_model_verifies_on_every_bipartition():
    box = builtin("class4")
    for bp in BIPARTITIONS:
        model = class4_tobl_model(bp)
        assert model.bipartition == bp
        assert len(model.weights) == 4
        assert all(w == Fraction(1, 4) for _, w in model.weights)
        assert verify_model(model, box)
        assert model.induced_box(0).table == model.induced_box(1).table


def test_verify_model_rejects_wrong_box():
    model = class4_tobl_model(BIPARTITIONS[0])
    assert not verify_model(model, builtin("class44"))
    assert not verify_model(model, builtin("uniform3"))


def test_verify_model_rejects_bad_weights():
    base = class4_tobl_model(BIPARTITIONS[0])
    unnormalized = ToblModel(base.bipartition, base.weights[:3])
    assert not verify_model(unnormalized, builtin("class4"))


def test_lp_weights_for_class4_form_a_valid_model():
    # the solver's own feasible point, read back as a model, must also verify
    box = builtin("class4")
    for bp in BIPARTITIONS:
        cert = is_tobl(box, bp)
        model = ToblModel(bp, cert.point)
        assert verify_model(model, box)


def test_local_box_is_tobl_everywhere():
    det = builtin("deterministic(2,1,3)")
    for bp in BIPARTITIONS:
        assert is_tobl(det, bp).feasible


def test_tobl_problem_shape():
    problem = tobl_problem(builtin("class4"), BIPARTITIONS[1])
    assert problem.num_vars == 16384
    assert len(problem.rows) == 129
    # normalization row touches every column
    assert len(problem.rows[128][0]) == 16384
    assert problem.rows[128][1] == 1
