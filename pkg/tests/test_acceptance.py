"""Acceptance criteria 1-8, each reported as one PASS/FAIL line."""

import json
import random
import time
from importlib import resources

import oracles
from conftest import ACCEPTANCE
from docgen import random_document
from serrelab import dsl
from serrelab.cli import main
from serrelab.constructions import c_double, fig3_tower, random_mirror_pairs, verify_c_double
from serrelab.gog import ConjugacySolver, pi1_presentation, to_word
from serrelab.stallings import contains, fold, is_malnormal, rank_and_index
from serrelab.towers import (
    AbelianExt,
    build_tower,
    centralizer_is_cyclic,
    prop51_sampling,
    random_element,
    random_non_conjugate_pairs,
    retraction,
    separation_experiment,
)
from serrelab.words import (
    Alphabet,
    are_conjugate,
    commutator,
    exponent_vector,
    invert,
    is_indivisible,
    power,
    random_word,
    reduced_words,
)

FIX = resources.files("serrelab") / "fixtures"
F2 = Alphabet("F2", ("a", "b"))


def record(n, ok, text, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"{text}; {elapsed:.1f}s (limit {limit}s)"
    ACCEPTANCE.append((n, ok, line))
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {line}")
    return ok


def test_criterion_1_magnus_pair(capsys):
    t0 = time.perf_counter()
    code = main(["verify", "magnus-pair", "--format", "json"])
    rec = json.loads(capsys.readouterr().out)
    elapsed = time.perf_counter() - t0
    d = rec["detail"]
    ok = code == 0 and rec["status"] == "verified"
    ok = ok and d["u_v_not_conjugate"] and d["ncl_witnesses_verify"] and d["rho_images_conjugate"]
    ok = ok and all(d["rho_strict"].values()) and not d["failures"]
    assert record(1, ok, f"verify magnus-pair -> {rec['status']}", elapsed, 60)


def _free_oracle_sets(words, half):
    zs = [F2.from_letters(z) for z in oracles.ball(2, half)]
    return [frozenset(oracles.mul(z.letters(), w.letters(), oracles.inv(z.letters())) for z in zs) for w in words]


def test_criterion_2_free_conjugacy():
    t0 = time.perf_counter()
    ws = reduced_words(F2, 6)
    # every conjugator of a pair of length <= 6 has length <= 6 and splits into halves of length <= 3
    sets = _free_oracle_sets(ws, 3)
    mismatches = 0
    bad_certs = 0
    pairs = 0
    for i, u in enumerate(ws):
        su = sets[i]
        for j, v in enumerate(ws):
            pairs += 1
            expect = not su.isdisjoint(sets[j])
            cert = are_conjugate(u, v)
            if (cert is not None) != expect:
                mismatches += 1
            elif cert is not None and not cert.verify(u, v):
                bad_certs += 1
    rng = random.Random(2024)
    rand_mismatch = 0
    n_conj = 0
    for k in range(1000):
        u = random_word(F2, rng.randint(0, 12), rng)
        if k % 2:
            z = random_word(F2, rng.randint(0, 6), rng)
            v = invert(z) * u * z
            if len(v) > 12:
                v = random_word(F2, rng.randint(0, 12), rng)
        else:
            v = random_word(F2, rng.randint(0, 12), rng)
        expect = oracles.free_conjugate(u.letters(), v.letters(), 2)
        n_conj += expect
        cert = are_conjugate(u, v)
        if (cert is not None) != expect or (cert is not None and not cert.verify(u, v)):
            rand_mismatch += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and bad_certs == 0 and rand_mismatch == 0
    text = (
        f"{pairs} exhaustive pairs ({mismatches} mismatches, {bad_certs} bad certificates), "
        f"1000 random pairs ({n_conj} conjugate, {rand_mismatch} mismatches)"
    )
    assert record(2, ok, text, elapsed, 120)


def test_criterion_3_stallings():
    t0 = time.perf_counter()
    rng = random.Random(3)
    ball = [F2.from_letters(w) for w in oracles.ball(2, 6)]
    memb_bad = 0
    ns_cases = ns_bad = 0
    for _ in range(100):
        gens = [random_word(F2, rng.randint(1, 5), rng) for _ in range(rng.randint(1, 3))]
        g = fold(gens)
        members = oracles.subgroup_elements([w.letters() for w in gens], 6)
        memb_bad += sum(contains(g, w) != (w.letters() in members) for w in ball)
        rank, index = rank_and_index(g)
        if index != float("inf"):
            ns_cases += 1
            ns_bad += rank != 1 + index * (len(F2) - 1)
    for degree in range(1, 9):
        for _ in range(5):
            perms = oracles.random_permutation_action(2, degree, rng)
            g = fold([F2.from_letters(w) for w in oracles.stabilizer_generators(perms, degree)], F2)
            rank, index = rank_and_index(g)
            ns_cases += 1
            ns_bad += index != degree or rank != 1 + index * (len(F2) - 1)
    a, b = F2.gens()
    H = fold([commutator(a, b), power(b, -2) * invert(a) * power(b, 2) * a])
    mal = is_malnormal(H).malnormal
    A2 = fold([power(a, 2)])
    res = is_malnormal(A2)
    not_mal = not res.malnormal and res.verify(A2)
    elapsed = time.perf_counter() - t0
    ok = memb_bad == 0 and ns_bad == 0 and mal and not_mal
    text = (
        f"membership mismatches {memb_bad} over 100 subgroups, Nielsen-Schreier {ns_cases - ns_bad}/{ns_cases}, "
        f"H malnormal {mal}, <a^2> refuted with verified witness {not_mal}"
    )
    assert record(3, ok, text, elapsed, 60)


def _abelian_lattice(g):
    A = pi1_presentation(g).alphabet
    lat = oracles.relation_lattice([exponent_vector(r) for r in pi1_presentation(g).relations], len(A))
    return lambda p: oracles.abelian_class(exponent_vector(to_word(g, p)), lat)


def test_criterion_4_gog_conjugacy():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for fname, gname in (("amalgam.gg", "Amal"), ("hnn.gg", "H")):
        g = dsl.parse((FIX / fname).read_text()).graph(gname)
        els = oracles.elements_up_to(g, 4, 4)
        halves = oracles.elements_up_to(g, 3, 3)
        oracle_pairs = oracles.gog_conjugacy_pairs(g, els, halves)
        # solver side: classes against representatives, bucketed by the abelianization
        solver = ConjugacySolver(g)
        key = _abelian_lattice(g)
        reps: dict = {}
        cls = []
        certs = bad = 0
        for i, p in enumerate(els):
            bucket = reps.setdefault(key(p), [])
            for r in bucket:
                res = solver.decide(els[r], p)
                if res.conjugate:
                    certs += 1
                    bad += not res.verify(g, els[r], p)
                    cls.append(cls[r])
                    break
            else:
                cls.append(i)
                bucket.append(i)
        solver_pairs = {(i, j) for i in range(len(els)) for j in range(i + 1, len(els)) if cls[i] == cls[j]}
        # every oracle pair across different buckets would be a missed conjugacy
        diff = len(solver_pairs ^ oracle_pairs)
        ok = ok and diff == 0 and bad == 0
        parts.append(f"{gname}: {len(els)} elements, {len(oracle_pairs)} conjugate pairs, {diff} mismatches, {certs - bad}/{certs} certificates")
    elapsed = time.perf_counter() - t0
    assert record(4, ok, "; ".join(parts), elapsed, 300)


def _flagged_indivisible(t, count, rng):
    out = []
    G = t.graph()
    r1 = retraction(t, 1)
    while len(out) < count:
        p = random_element(t, rng.randint(1, 6), rng)
        img = r1(p)
        if img.is_identity() or not centralizer_is_cyclic(G, p, t.solver()):
            continue
        if is_indivisible(img):
            out.append(p)
    return out


def test_criterion_5_ice_separation():
    t0 = time.perf_counter()
    x, y = Alphabet("F", ("x", "y")).gens()
    F = x.alphabet
    h1 = build_tower(F, [AbelianExt(commutator(x, y), names=("t",))], name="I")
    h2 = build_tower(F, [AbelianExt(commutator(x, y), names=("t",)), AbelianExt(x * x * y, names=("s",))], name="J")
    rng = random.Random(5)
    failures = 0
    worst = 0
    for t, count in ((h1, 50), (h2, 25)):
        for p, q in random_non_conjugate_pairs(t, count, rng, max_length=6):
            rep = separation_experiment(t, [p, q], 16)
            if rep.minimal_n is None or not rep.replay_ok:
                failures += 1
            else:
                worst = max(worst, rep.minimal_n)
    flagged = _flagged_indivisible(h1, 13, rng) + _flagged_indivisible(h2, 12, rng)
    ind_bad = 0
    for p, t in zip(flagged, [h1] * 13 + [h2] * 12):
        rep = separation_experiment(t, [p], 16, indivisible=[0], scan_all=True)
        ind_bad += not rep.indivisibility_ok or len(rep.steps) != 16
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and ind_bad == 0
    text = (
        f"75 pairs, {failures} exhausted, largest minimal N {worst}; "
        f"{len(flagged)} flagged indivisible, {ind_bad} lost indivisibility for N <= 16"
    )
    assert record(5, ok, text, elapsed, 300)


def test_criterion_6_c_double():
    t0 = time.perf_counter()
    x, y = Alphabet("F", ("x", "y")).gens()
    f = c_double(commutator(x, y))
    rep = verify_c_double(f, count=100, pairs=20, seed=0)
    # the mirror pairs used above satisfy the admission conditions
    mps = random_mirror_pairs(f, 20, random.Random(1))
    admissible = all(
        not any(exponent_vector(mp.left))
        and all(are_conjugate(mp.left, f.w ** n, allow_inverse=True) is None for n in range(-4, 5))
        for mp in mps
    )
    elapsed = time.perf_counter() - t0
    kinds = rep.members
    ok = rep.verified and sum(kinds.values()) >= 100 and rep.pairs == 20 and admissible
    ok = ok and kinds.get("conjugation", 0) > 0 and kinds.get("abelian", 0) > 0
    text = (
        f"{sum(kinds.values())} homs {kinds} x {rep.pairs} mirror pairs, {len(rep.failures)} non-conjugate images, "
        f"syllabic {rep.syllabic_ok} on {rep.syllabic_checked}, conjugate by t {rep.t_conjugate_ok}"
    )
    assert record(6, ok, text, elapsed, 120)


def test_criterion_7_fig3_tower():
    t0 = time.perf_counter()
    rep = prop51_sampling(fig3_tower(), pair_count=20, seed=0, n_max=16)
    elapsed = time.perf_counter() - t0
    ns = [p.minimal_n for p in rep.pairs]
    ok = len(rep.pairs) == 20 and rep.all_separated and rep.uv_separated_at is None
    text = (
        f"20 pairs separated at N in {sorted(set(n for n in ns if n))}, "
        f"{sum(n is None for n in ns)} exhausted; (u, v) separated at {rep.uv_separated_at}"
    )
    assert record(7, ok, text, elapsed, 300)


def _stable(capsys, argv):
    outs = []
    for _ in range(2):
        main(argv)
        outs.append(capsys.readouterr().out)
    return outs[0] == outs[1] and outs[0] != ""


def test_criterion_8_dsl(capsys):
    t0 = time.perf_counter()
    fixtures = sorted(p for p in FIX.iterdir() if p.name.endswith(".gg"))
    rt_bad = 0
    for p in fixtures:
        doc = dsl.parse(p.read_text())
        out = dsl.render(doc)
        rt_bad += dsl.parse(out) != doc or dsl.render(dsl.parse(out)) != out
    for seed in range(200):
        doc = dsl.parse(random_document(random.Random(seed)))
        out = dsl.render(doc)
        rt_bad += dsl.parse(out) != doc or dsl.render(dsl.parse(out)) != out
    common = ["--format", "json", "--no-timing", "--seed", "11"]
    runs = [["report", str(p)] + common for p in fixtures]
    runs += [
        ["verify", "magnus-pair"] + common,
        ["verify", "c-double", "--count", "20", "--pairs", "5"] + common,
        ["prop51", "--pairs", "3"] + common,
        ["conj", "--left", "x y x^-1", "--right", "y"] + common,
    ]
    unstable = [r[:2] for r in runs if not _stable(capsys, r)]
    elapsed = time.perf_counter() - t0
    ok = rt_bad == 0 and not unstable
    text = f"{len(fixtures)} fixtures + 200 generated documents, {rt_bad} round-trip failures; {len(runs)} reports, unstable {unstable}"
    assert record(8, ok, text, elapsed, 120)
