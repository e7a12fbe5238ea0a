"""Command line entry point: ``freesep <command> ...``.

Every command writes one canonical JSON report to stdout (or ``--out``) and a
short human summary to stderr.  Exit status: 0 when the run finished with the
expected outcome, 1 when it found a violation or separating map, 2 on usage
or internal errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import isolation, lcs_witness, pgroups, stallings
from ._kernels import BACKENDS
from .magnus import format_weight, lcs_weight
from .words import Alphabet, DEFAULT_NAMES, Word, WordParseError, apply_endomorphism, inverse, multiply

EXIT_OK, EXIT_FOUND, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _default_threads() -> int:
    raw = os.environ.get("FREESEP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"FREESEP_THREADS must be an integer, got {raw!r}")


def _alphabet(args, texts: list[str]) -> Alphabet:
    names = args.names or DEFAULT_NAMES
    if args.rank is not None:
        if args.rank < 1:
            raise UsageError("--rank must be positive")
        return Alphabet(args.rank, names[: args.rank])
    used = [names.find(c.lower()) for t in texts for c in t]
    needed = max(used, default=0) + 1
    return Alphabet(max(needed, 1), names[: max(needed, 1)])


def _parse_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",")] if text.strip() else []


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in _parse_list(text)]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _words(alpha: Alphabet, texts: list[str]) -> list[Word]:
    return [alpha.parse(t) for t in texts]


def _element_json(e):
    return list(e) if isinstance(e, tuple) else int(e)


def _hom_json(alpha: Alphabet, h: pgroups.Homomorphism | None):
    if h is None:
        return None
    return {
        "target": h.target.name,
        "images": {alpha.names[g]: _element_json(h.image(g)) for g in range(len(h.images))},
    }


# --------------------------------------------------------------------------
# commands: each returns (report dict, exit code, summary)


def cmd_member(args):
    texts = _parse_list(args.gens) + [args.word]
    alpha = _alphabet(args, texts)
    gens = _words(alpha, _parse_list(args.gens))
    word = alpha.parse(args.word)
    graph = stallings.build(gens, rank=alpha.rank)
    member = graph.contains(word)
    index = stallings.index_info(graph)
    report = {
        "parameters": {"rank": alpha.rank, "names": alpha.names, "gens": [alpha.format(g) for g in gens], "word": alpha.format(word)},
        "outcome": {"member": member},
        "counters": {
            "graph_vertices": graph.num_vertices,
            "subgroup_rank": stallings.rank_of_subgroup(graph),
            "index": "infinite" if index is None else index,
        },
        "witnesses": {},
    }
    return report, EXIT_OK, f"member={str(member).lower()}"


def cmd_isolated(args):
    gen_texts = _parse_list(args.gens)
    alpha = _alphabet(args, gen_texts)
    gens = _words(alpha, gen_texts)
    graph = stallings.build(gens, rank=alpha.rank)
    bounds = isolation.ScanBounds(args.max_len, tuple(_parse_ints(args.exponents)))
    if args.pprime is not None:
        bounds = isolation.prime_exponents(args.pprime, bounds)
    rep = isolation.scan(graph, bounds, backend=args.backend, threads=args.threads)
    viol = [{"root": alpha.format(v.root), "exponent": v.exponent} for v in rep.violations]
    report = {
        "parameters": {
            "rank": alpha.rank,
            "names": alpha.names,
            "gens": [alpha.format(g) for g in gens],
            "max_len": bounds.max_word_length,
            "exponents": list(bounds.exponents),
            "pprime": args.pprime,
        },
        "outcome": {"violations_found": len(viol), "isolated_up_to_bounds": not viol},
        "counters": {"words_scanned": rep.words_scanned, "pairs_checked": rep.words_scanned * len(bounds.exponents)},
        "witnesses": {"violations": viol},
    }
    summary = f"{len(viol)} violation(s) over {rep.words_scanned} words, L={bounds.max_word_length}, E={list(bounds.exponents)}"
    return report, EXIT_FOUND if viol else EXIT_OK, summary


def cmd_witness(args):
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    try:
        reports = lcs_witness.nilpotent_image_equality(args.n, threads=args.threads)
    except lcs_witness.CertificationError as exc:
        report = {"parameters": {"n": args.n}, "outcome": {"certified": False, "error": str(exc)}, "counters": {}, "witnesses": {}}
        return report, EXIT_FOUND, str(exc)
    entries = [
        {
            "n": r.n,
            "witness_a": lcs_witness.A_ALPHABET.format(r.witness),
            "witness_x": lcs_witness.X_ALPHABET.format(r.expanded),
            "a_length": len(r.witness),
            "x_length": len(r.expanded),
            "discrepancy_weight": format_weight(r.discrepancy_weight, r.n),
        }
        for r in reports
    ]
    report = {
        "parameters": {"n": args.n, "gens": ["xYXyx", "y"]},
        "outcome": {"certified": all(r.certified for r in reports), "classes_certified": [r.n for r in reports]},
        "counters": {"reports": len(reports), "max_x_length": max(len(r.expanded) for r in reports)},
        "witnesses": {"reports": entries},
    }
    return report, EXIT_OK, f"certified n=2..{args.n}"


def cmd_psep(args):
    gen_texts = _parse_list(args.gens)
    alpha = _alphabet(args, gen_texts + [args.exclude])
    gens = _words(alpha, gen_texts)
    f = alpha.parse(args.exclude)
    primes = _parse_ints(args.p)
    for p in primes:
        if not isolation.is_prime(p):
            raise UsageError(f"--p must list primes, got {p}")
    try:
        targets = pgroups.parse_targets(args.targets, primes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = pgroups.separability_scan(gens, f, targets, budget=args.budget, backend=args.backend, threads=args.threads)
    per_target = [
        {
            "target": t.target.name,
            "order": t.target.order,
            "homs_total": t.homs_total,
            "homs_separating": t.homs_separating,
            "first_separating": _hom_json(alpha, t.first_separating),
        }
        for t in rep.targets
    ]
    report = {
        "parameters": {
            "rank": alpha.rank,
            "names": alpha.names,
            "gens": [alpha.format(g) for g in gens],
            "exclude": alpha.format(f),
            "p": primes,
            "targets": [t.name for t in targets],
            "budget": args.budget,
        },
        "outcome": {
            "separated": rep.homs_separating > 0,
            "scope": "all homomorphisms into the listed targets only",
        },
        "counters": {"homs_total": rep.homs_total, "homs_separating": rep.homs_separating, "targets": per_target},
        "witnesses": {"first_separating": _hom_json(alpha, rep.first_separating)},
    }
    summary = f"homs_separating={rep.homs_separating} of {rep.homs_total} over {len(targets)} target(s)"
    return report, EXIT_FOUND if rep.homs_separating else EXIT_OK, summary


def cmd_separate(args):
    gen_texts = _parse_list(args.gens)
    alpha = _alphabet(args, gen_texts + [args.word])
    gens = _words(alpha, gen_texts)
    word = alpha.parse(args.word)
    graph = stallings.build(gens, rank=alpha.rank)
    try:
        rep = stallings.separating_permutation_rep(graph, word)
    except stallings.NotSeparableError as exc:
        raise UsageError(f"{alpha.format(word) or '<empty>'} is a member: {exc}") from exc
    verified = rep.separates(gens, word)
    report = {
        "parameters": {"rank": alpha.rank, "names": alpha.names, "gens": [alpha.format(g) for g in gens], "word": alpha.format(word)},
        "outcome": {"separated": verified, "basepoint_image": rep.act(0, word)},
        "counters": {"degree": rep.degree, "graph_vertices": graph.num_vertices},
        "witnesses": {
            "permutation_rep": {
                "degree": rep.degree,
                "basepoint": 0,
                "images": {alpha.names[g]: list(rep.images[g]) for g in range(len(rep.images))},
            }
        },
    }
    return report, EXIT_OK if verified else EXIT_ERROR, f"degree-{rep.degree} permutation rep separates"


def cmd_verify(args):
    with open(args.report) as fh:
        report = json.load(fh)
    problems = verify_report(report)
    out = {
        "parameters": {"report": args.report, "checked_command": report.get("command")},
        "outcome": {"verified": not problems},
        "counters": {},
        "witnesses": {"problems": problems},
    }
    return out, EXIT_FOUND if problems else EXIT_OK, "verified" if not problems else "; ".join(problems)


# --------------------------------------------------------------------------


def verify_report(report: dict) -> list[str]:
    """Re-check the witnesses embedded in a report using only the report."""
    cmd = report.get("command")
    params = report.get("parameters", {})
    wit = report.get("witnesses", {})
    problems = []
    if cmd in ("member", "isolated", "separate", "psep"):
        alpha = Alphabet(params["rank"], params.get("names") or DEFAULT_NAMES[: params["rank"]])
        gens = [alpha.parse(t) for t in params["gens"]]
        graph = stallings.build(gens, rank=alpha.rank)
    if cmd == "member":
        if graph.contains(alpha.parse(params["word"])) != report["outcome"]["member"]:
            problems.append("membership answer does not reproduce")
    elif cmd == "isolated":
        for v in wit.get("violations", []):
            f = alpha.parse(v["root"])
            if not graph.contains(f ** v["exponent"]) or graph.contains(f):
                problems.append(f"violation {v} does not re-verify")
    elif cmd == "witness":
        x = lcs_witness.X_ALPHABET.generator(0)
        for e in wit.get("reports", []):
            wa = lcs_witness.A_ALPHABET.parse(e["witness_a"])
            wx = lcs_witness.X_ALPHABET.parse(e["witness_x"])
            if apply_endomorphism(lcs_witness.subgroup_images(), wa) != wx:
                problems.append(f"n={e['n']}: X-form is not the expansion of the A-form")
            if lcs_weight(multiply(inverse(wx), x), e["n"], rank=2) < e["n"]:
                problems.append(f"n={e['n']}: discrepancy not in gamma_{e['n']}")
    elif cmd == "separate":
        pr = wit["permutation_rep"]
        images = tuple(tuple(pr["images"][alpha.names[g]]) for g in range(len(pr["images"])))
        rep = stallings.PermutationRep(pr["degree"], images)
        if not rep.separates(gens, alpha.parse(params["word"]), pr["basepoint"]):
            problems.append("permutation rep does not separate")
    elif cmd == "psep":
        f = alpha.parse(params["exclude"])
        for t in report["counters"]["targets"]:
            h = t["first_separating"]
            if h is None:
                continue
            G = _target_from_name(h["target"])
            imgs = [_element_from_json(h["images"].get(alpha.names[g], None), G) for g in range(alpha.rank)]
            if not pgroups.separates(pgroups.Homomorphism(G, tuple(imgs)), gens, f):
                problems.append(f"{t['target']}: exhibited homomorphism does not separate")
    else:
        problems.append(f"unknown command {cmd!r}")
    return problems


def _target_from_name(name: str) -> pgroups.FiniteGroup:
    kind, _, rest = name.partition("(")
    a, b = (int(v) for v in rest.rstrip(")").split(","))
    return pgroups.FiniteGroup.cyclic(a, b) if kind == "cyclic" else pgroups.FiniteGroup.unitriangular(a, b)


def _element_from_json(v, G):
    if v is None:
        return G.identity
    return tuple(v) if isinstance(v, list) else int(v)


# --------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, words: bool = True):
    if words:
        p.add_argument("--rank", type=int, default=None, help="free group rank (default: smallest rank covering the input words)")
        p.add_argument("--names", default=None, help="generator names, one lowercase character each (default: xyzw...)")
    p.add_argument("--out", default=None, help="write the JSON report to this file instead of stdout")
    p.add_argument("--threads", type=int, default=None, help="worker threads for scans (default: $FREESEP_THREADS or 1)")
    p.add_argument("--backend", choices=BACKENDS, default=None, help="scan kernel backend (default: $FREESEP_BACKEND or numba)")
    p.add_argument("--quiet", action="store_true", help="suppress the human summary on stderr")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freesep", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("member", help="decide membership of a word in a finitely generated subgroup")
    p.add_argument("--gens", required=True, help="comma-separated generators, uppercase = inverse, e.g. xYXyx,y")
    p.add_argument("--word", required=True, help="the word to test (empty string = identity)")
    _add_common(p)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("isolated", help="scan for roots f with f^m in H but f not in H")
    p.add_argument("--gens", required=True, help="comma-separated subgroup generators")
    p.add_argument("--max-len", type=int, default=10, help="longest root length L (default 10)")
    p.add_argument("--exponents", default="2,3,4,5,6", help="comma-separated exponents >= 2 (default 2,3,4,5,6)")
    p.add_argument("--pprime", type=int, default=None, help="restrict exponents to primes other than this prime")
    _add_common(p)
    p.set_defaults(func=cmd_isolated)

    p = sub.add_parser("witness", help="certify x in H*gamma_n for n = 2..N with explicit words")
    p.add_argument("--n", type=int, default=10, help="largest class N (default 10)")
    _add_common(p, words=False)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("psep", help="count homomorphisms to small p-groups separating a word from a subgroup")
    p.add_argument("--gens", required=True, help="comma-separated subgroup generators")
    p.add_argument("--exclude", required=True, help="the word to separate")
    p.add_argument("--p", required=True, help="prime or comma-separated primes")
    p.add_argument("--targets", default="cyclic:1-3,ut:3", help="target families per prime, e.g. cyclic:1-3,ut:3 (default)")
    p.add_argument("--budget", type=int, default=pgroups.DEFAULT_BUDGET, help="max homomorphisms per target")
    _add_common(p)
    p.set_defaults(func=cmd_psep)

    p = sub.add_parser("separate", help="build a finite permutation action separating a word from a subgroup")
    p.add_argument("--gens", required=True, help="comma-separated subgroup generators")
    p.add_argument("--word", required=True, help="a word outside the subgroup")
    _add_common(p)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("verify", help="re-check the witnesses inside a saved JSON report")
    p.add_argument("report", help="path to a report written by another command")
    _add_common(p, words=False)
    p.set_defaults(func=cmd_verify)
    return ap


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def run(argv=None) -> tuple[int, dict | None]:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.threads is None:
            args.threads = _default_threads()
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        t0 = time.perf_counter()
        report, code, summary = args.func(args)
        report = {"command": args.command, **report, "elapsed_seconds": round(time.perf_counter() - t0, 6)}
    except (UsageError, WordParseError, ValueError) as exc:
        print(f"freesep {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR, None

    text = dumps(report) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(f"freesep {args.command}: {summary} ({report['elapsed_seconds']:.3f}s)", file=sys.stderr)
    return code, report


def main(argv=None) -> int:
    try:
        code, _ = run(argv)
    except SystemExit as exc:  # argparse usage errors already exit with 2
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"freesep: internal error: {exc!r}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
