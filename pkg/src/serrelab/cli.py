"""Command-line task runner.

    serrelab check FILE
    serrelab conj [FILE] --left W --right V [--pm] [--in SCOPE]
    serrelab verify magnus-pair [--file FILE]
    serrelab verify c-double [--w WORD] [--count K] [--pairs P]
    serrelab separate FILE [--task NAME]
    serrelab discriminate FILE [--task NAME]
    serrelab prop51 [--pairs P] [--max N]
    serrelab report FILE

Every task produces one report.  With ``--format json`` each report is one
JSON object per line with keys ``task, status, seed, timing_ms, detail``.
Exit status: 0 when every task verified, 1 when some task was refuted or
exhausted, 2 on input or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .dsl import DEFAULT_TASK_N_MAX, Document, ParseError, TaskDecl, parse, parse_word, scope_alphabet
from .gog import ConjugacySolver, GogError, format_path, from_word, inverse, pi1_presentation
from .towers import InputError, TowerError, discrimination_experiment, separation_experiment
from .words import Alphabet, are_conjugate, rename

VERIFIED, REFUTED, ERROR, EXHAUSTED = "verified", "refuted", "error", "exhausted"
EXIT = {VERIFIED: 0, REFUTED: 1, EXHAUSTED: 1, ERROR: 2}
SEED_ENV = "SERRELAB_SEED"


@dataclass
class TaskResult:
    task: str
    status: str
    seed: int
    timing_ms: int = 0
    detail: dict = field(default_factory=dict)

    def to_json(self, timing: bool = True) -> str:
        d = {
            "task": self.task,
            "status": self.status,
            "seed": self.seed,
            "timing_ms": self.timing_ms if timing else 0,
            "detail": self.detail,
        }
        return json.dumps(d, sort_keys=False)

    def to_text(self, timing: bool = True) -> str:
        head = f"{self.task}: {self.status} (seed {self.seed}"
        head += f", {self.timing_ms} ms)" if timing else ")"
        lines = [head]
        for k, v in self.detail.items():
            lines.append(f"  {k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
        return "\n".join(lines)


def _timed(name: str, seed: int, fn: Callable[[], tuple[str, dict]]) -> TaskResult:
    t0 = time.perf_counter()
    try:
        status, detail = fn()
    except (ParseError, InputError, TowerError, GogError, KeyError, ValueError) as e:
        status, detail = ERROR, {"error": str(e)}
        cert = getattr(e, "certificate", None)
        if cert is not None:
            detail["certificate"] = cert
    ms = int(round((time.perf_counter() - t0) * 1000))
    return TaskResult(name, status, seed, ms, detail)


# -- task bodies ---------------------------------------------------------------


def _load(path: str) -> Document:
    return parse(Path(path).read_text(encoding="utf-8"))


def check_document(doc: Document) -> tuple[str, dict]:
    detail: dict = {"graphs": {}, "towers": {}, "homs": {}}
    ok = True
    for d in doc.of_kind("graph"):
        try:
            doc.graph(d.name)
            detail["graphs"][d.name] = "valid"
        except GogError as e:
            ok = False
            detail["graphs"][d.name] = f"invalid: {e}"
    for d in doc.of_kind("tower"):
        try:
            t = doc.tower(d.name)
            detail["towers"][d.name] = f"valid, height {t.height}" + (", ICE" if t.is_ice else "")
        except (TowerError, GogError) as e:
            ok = False
            detail["towers"][d.name] = f"invalid: {e}"
    for d in doc.of_kind("hom"):
        try:
            h = doc.hom(d.name)
        except GogError as e:
            ok = False
            detail["homs"][d.name] = f"invalid: {e}"
            continue
        bad = h.failing_relations() if hasattr(h, "failing_relations") else []
        if bad:
            ok = False
            detail["homs"][d.name] = f"breaks relation {bad[0]}"
        else:
            detail["homs"][d.name] = "respects relations"
    detail["tasks"] = [t.name for t in doc.tasks]
    return (VERIFIED if ok else REFUTED), detail


def conj_in_scope(doc: Optional[Document], scope: Optional[str], left, right, pm: bool) -> tuple[str, dict]:
    """``left`` and ``right`` are words over the scope alphabet (or strings without a document)."""
    if doc is None:
        return _conj_free(left, right, pm)
    kind = doc.scope_kind(scope)
    if kind == "alphabet":
        return _conj_free(left, right, pm)
    if kind == "graph":
        g = doc.graph(scope)
    else:
        g = doc.tower(scope).graph()
        A = pi1_presentation(g).alphabet
        left, right = rename(left, A), rename(right, A)
    p, q = from_word(g, left), from_word(g, right)
    s = ConjugacySolver(g)
    options = [(q, 1)] + ([(inverse(g, q), -1)] if pm else [])
    for target, sign in options:
        res = s.decide(p, target)
        if res.conjugate:
            ok = res.verify(g, p, target)
            detail = {
                "left": str(left),
                "right": str(right),
                "classification": [res.left.kind, res.right.kind],
                "conjugator": format_path(g, res.conjugator),
                "sign": sign,
                "certificate_verified": ok,
            }
            return (VERIFIED if ok else ERROR), detail
    cls = s.classify(p), s.classify(q)
    return REFUTED, {"left": str(left), "right": str(right), "classification": [c.kind for c in cls]}


def _conj_free(left, right, pm: bool) -> tuple[str, dict]:
    cert = are_conjugate(left, right, allow_inverse=pm)
    detail = {"left": str(left), "right": str(right)}
    if cert is None:
        return REFUTED, detail
    ok = cert.verify(left, right)
    detail.update(conjugator=str(cert.conjugator), sign=cert.sign, certificate_verified=ok)
    return (VERIFIED if ok else ERROR), detail


def run_task(doc: Document, task: TaskDecl, seed_override: Optional[int]) -> TaskResult:
    seed = seed_override if seed_override is not None else (task.seed if task.seed is not None else 0)

    def body() -> tuple[str, dict]:
        if task.kind == "conj":
            status, detail = conj_in_scope(doc, task.target, task.elements[0], task.elements[1], task.pm)
            return status, detail
        t = doc.tower(task.target)
        S = [t.element(w) for w in task.elements]
        n_max = task.n_max if task.n_max is not None else DEFAULT_TASK_N_MAX
        if task.kind == "separate":
            rep = separation_experiment(t, S, n_max, indivisible=task.indivisible, scan_all=bool(task.indivisible))
            d = rep.as_dict()
            if rep.minimal_n is None:
                return EXHAUSTED, d
            ok = rep.replay_ok and rep.indivisibility_ok
            return (VERIFIED if ok else REFUTED), d
        rep = discrimination_experiment(t, S, n_max)
        return (VERIFIED if rep.minimal_n is not None else EXHAUSTED), rep.as_dict()

    return _timed(f"{task.kind}:{task.name}", seed, body)


def _run_file_task(args: tuple[str, str, Optional[int]]) -> TaskResult:
    path, name, seed = args
    doc = _load(path)
    task = doc.find("task", name)
    return run_task(doc, task, seed)


def run_tasks(path: str, doc: Document, tasks: list[TaskDecl], seed: Optional[int], jobs: int) -> list[TaskResult]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_file_task, [(path, t.name, seed) for t in tasks]))
    return [run_task(doc, t, seed) for t in tasks]


# -- command handlers ------------------------------------------------------------


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    return int(env) if env else 0


def _explicit_seed(args) -> Optional[int]:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    return int(env) if env else None


def cmd_check(args) -> list[TaskResult]:
    return [_timed("check", _seed(args), lambda: check_document(_load(args.file)))]


def _free_alphabet_for(*texts: str) -> Alphabet:
    import re

    names = sorted({m for t in texts for m in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", t)})
    return Alphabet("F", tuple(names) or ("x",))


def _parse_word_in(doc: Optional[Document], scope: Optional[str], text: str, A: Alphabet):
    return parse_word(text, A, doc, scope)


def cmd_conj(args) -> list[TaskResult]:
    seed = _seed(args)

    def body():
        if args.file is None:
            A = _free_alphabet_for(args.left, args.right)
            doc, scope = None, None
        else:
            doc = _load(args.file)
            scope = args.scope
            if scope is None:
                scopes = [d.name for d in doc.decls if type(d).__name__ in ("AlphabetDecl", "GraphDecl", "TowerDecl")]
                if not scopes:
                    raise ValueError("the file declares no alphabet, graph or tower")
                scope = scopes[-1]
            A = scope_alphabet(doc, scope)
        left = _parse_word_in(doc, scope, args.left, A)
        right = _parse_word_in(doc, scope, args.right, A)
        return conj_in_scope(doc, scope, left, right, args.pm)

    return [_timed("conj", seed, body)]


def cmd_verify(args) -> list[TaskResult]:
    seed = _seed(args)
    if args.what == "magnus-pair":
        return [_timed("verify:magnus-pair", seed, lambda: _verify_magnus(args))]
    return [_timed("verify:c-double", seed, lambda: _verify_cdouble(args, seed))]


def _verify_magnus(args) -> tuple[str, dict]:
    from .constructions import MagnusPairFixture, magnus_pair_gog, verify_magnus_pair
    from .gog import loop_of_generator

    if args.file:
        doc = _load(args.file)
        g = doc.graph(args.graph)
        rho = doc.hom(args.hom)
        f = MagnusPairFixture(g, loop_of_generator(g, "u"), loop_of_generator(g, "v"), rho)
    else:
        f = magnus_pair_gog()
    rep = verify_magnus_pair(f)
    return (VERIFIED if rep.verified else REFUTED), rep.as_dict()


def _verify_cdouble(args, seed: int) -> tuple[str, dict]:
    from .constructions import F2, c_double, verify_c_double

    if args.file:
        doc = _load(args.file)
        w = doc.find("word", args.w).word if args.w else None
        if w is None:
            raise ValueError("--w NAME is required with --file")
    elif args.w:
        w = _parse_word_in(None, None, args.w, F2)
    else:
        x, y = F2.gens()
        w = x * y * ~x * ~y
    f = c_double(w)
    rep = verify_c_double(f, args.count, args.pairs, seed)
    d = {"w": str(w), "c_test_assumed": f.c_test_assumed}
    d.update(rep.as_dict())
    return (VERIFIED if rep.verified else REFUTED), d


def _file_tasks(args, kinds: tuple[str, ...]) -> list[TaskResult]:
    try:
        doc = _load(args.file)
    except ParseError as e:
        return [TaskResult("parse", ERROR, _seed(args), 0, {"error": str(e)})]
    tasks = [t for t in doc.tasks if t.kind in kinds]
    if getattr(args, "task", None):
        tasks = [t for t in tasks if t.name == args.task]
        if not tasks:
            return [TaskResult("select", ERROR, _seed(args), 0, {"error": f"no task named {args.task!r}"})]
    return run_tasks(args.file, doc, tasks, _explicit_seed(args), args.jobs)


def cmd_separate(args) -> list[TaskResult]:
    return _file_tasks(args, ("separate",))


def cmd_discriminate(args) -> list[TaskResult]:
    return _file_tasks(args, ("discriminate",))


def cmd_report(args) -> list[TaskResult]:
    try:
        _load(args.file)
    except ParseError as e:
        return [TaskResult("parse", ERROR, _seed(args), 0, {"error": str(e)})]
    return cmd_check(args) + _file_tasks(args, ("separate", "discriminate", "conj"))


def cmd_prop51(args) -> list[TaskResult]:
    seed = _seed(args)

    def body():
        from .constructions import fig3_tower
        from .towers import prop51_sampling

        rep = prop51_sampling(fig3_tower(), pair_count=args.pairs, seed=seed, n_max=args.max)
        ok = rep.all_separated and rep.uv_separated_at is None
        return (VERIFIED if ok else REFUTED), rep.as_dict()

    return [_timed("prop51", seed, body)]


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent tasks")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--no-timing", action="store_true", help="report timing_ms as 0 for byte-stable output")

    ap = argparse.ArgumentParser(prog="serrelab", description="Free groups, graphs of groups and towers.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse and validate a file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("conj", parents=[common], help="decide conjugacy of two elements")
    p.add_argument("file", nargs="?")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--pm", action="store_true", help="also allow conjugacy to the inverse")
    p.add_argument("--in", dest="scope", help="alphabet, graph or tower (default: the last declared)")
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("verify", parents=[common], help="verify a built-in construction")
    p.add_argument("what", choices=("magnus-pair", "c-double"))
    p.add_argument("--file", help="read the construction from a fixture file")
    p.add_argument("--graph", default="U", help="graph name in --file (magnus-pair)")
    p.add_argument("--hom", default="rho", help="strict map name in --file (magnus-pair)")
    p.add_argument("--w", help="doubling word: an expression, or a word name with --file")
    p.add_argument("--count", type=int, default=100, help="family size (c-double)")
    p.add_argument("--pairs", type=int, default=20, help="mirror pairs (c-double)")
    p.set_defaults(func=cmd_verify)

    for name, func in (("separate", cmd_separate), ("discriminate", cmd_discriminate)):
        p = sub.add_parser(name, parents=[common], help=f"run the {name} tasks of a file")
        p.add_argument("file")
        p.add_argument("--task", help="run only this task")
        p.set_defaults(func=func)

    p = sub.add_parser("prop51", parents=[common], help="separation sampling in the Magnus tower")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--max", type=int, default=16)
    p.set_defaults(func=cmd_prop51)

    p = sub.add_parser("report", parents=[common], help="validate a file and run all its tasks")
    p.add_argument("file")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        results = args.func(args)
    except ParseError as e:
        results = [TaskResult(args.command, ERROR, _seed(args), 0, {"error": str(e)})]
    except OSError as e:
        results = [TaskResult(args.command, ERROR, _seed(args), 0, {"error": str(e)})]
    timing = not args.no_timing
    for r in results:
        print(r.to_json(timing) if args.format == "json" else r.to_text(timing))
    return max(EXIT[r.status] for r in results)


if __name__ == "__main__":
    sys.exit(main())
