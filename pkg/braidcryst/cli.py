import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import yaml

from braidcryst_utils.config import setting
from braidcryst_utils.core_utils import dumps_json, env_bool, read_word_lines, to_jsonable, write_json

from . import crystallography as cryst
from . import finite_image as fi
from . import free_groups as fg
from . import verify
from .braids import BraidWord, format_word, parse_word
from .burau import (
    burau_image,
    common_fixed_vectors,
    discover_invariant_form,
    in_congruence,
    matrix_to_json,
    reduce_mod,
    representation_label,
    rho_m,
)
from .errors import BraidCrystError, InvalidBasisError, MalformedWordError, UnsupportedModeError
from .rewriting import MODES, abelianization, change_basis, class_of, coordinates, coset_of

logger = logging.getLogger("braidcryst")

MODE_ALIASES = {
    "full": "full-kernel",
    "full-kernel": "full-kernel",
    "center-quotient": "center-quotient-kernel",
    "center-quotient-kernel": "center-quotient-kernel",
    "subgroup": "subgroup-preimage",
    "subgroup-preimage": "subgroup-preimage",
}


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def _mode(name: str) -> str:
    try:
        return MODE_ALIASES[name]
    except KeyError:
        raise UnsupportedModeError(f"Unknown mode '{name}', expected one of {', '.join(MODES)}") from None


def _words(spec: Optional[str]) -> Optional[List[BraidWord]]:
    """``"1 1 1; 2 2 2"`` -> list of B_3 words."""
    if not spec:
        return None
    return [parse_word(part, 3) for part in spec.split(";") if part.strip()]


def _basis(path: Optional[str]) -> Optional[List[BraidWord]]:
    if not path:
        return None
    return [parse_word(line, 3) for line in read_word_lines(path)]


def _letter_order(args) -> Optional[Tuple[int, ...]]:
    text = getattr(args, "letter_order", None)
    if not text:
        return None
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise MalformedWordError(f"Letter order must be comma-separated integers, got '{text}'") from None


def _abelianization(args):
    mode = _mode(args.mode)
    gens = _words(getattr(args, "subgroup_gens", None))
    return abelianization(args.mod, mode, None, tuple(gens) if gens else None, _letter_order(args))


def _extension(args):
    mode = _mode(args.mode)
    gens = _words(getattr(args, "subgroup_gens", None))
    return cryst.build_extension(
        args.mod, mode, _basis(getattr(args, "basis", None)), gens, _letter_order(args)
    )


# ============================================================================
# Subcommands
# ============================================================================

def cmd_burau(args) -> dict:
    w = parse_word(args.word, args.n)
    M = burau_image(w, reduced=args.reduced)
    payload = {
        "word": format_word(w),
        "strands": w.strands,
        "representation": "reduced" if args.reduced else "unreduced",
        "matrix": matrix_to_json(M),
    }
    if args.mod:
        payload["modulus"] = args.mod
        payload["residues"] = reduce_mod(M, args.mod).tolist()
    if args.form:
        payload["invariant_form"] = discover_invariant_form(w.strands).to_json()
    if args.fixed:
        payload["fixed_vectors"] = common_fixed_vectors(w.strands).to_json()
    return payload


def cmd_member(args) -> dict:
    w = parse_word(args.word, args.n)
    if args.n is None and w.strands < 3:
        w = BraidWord(3, w.letters)
    return {
        "word": format_word(w),
        "strands": w.strands,
        "modulus": args.mod,
        "representation": representation_label(w.strands),
        "member": in_congruence(w, args.mod),
        "image": rho_m(w, args.mod).tolist(),
    }


def cmd_image(args) -> dict:
    G = fi.enumerate_image(args.mod, args.n, workers=args.workers)
    if args.quotient_center:
        G = fi.quotient_by_center(G, workers=args.workers)
    payload = fi.to_json(G)
    payload["center"] = [G.matrices[z].tolist() for z in fi.center(G)]
    payload["conjugacy_classes"] = len(fi.conjugacy_classes(G))
    return payload


def cmd_abelianize(args) -> dict:
    return _abelianization(args).summary()


def cmd_class(args) -> dict:
    actx = _abelianization(args)
    w = parse_word(args.word, 3)
    payload = {"word": format_word(w), "modulus": args.mod, "mode": actx.cosets.mode}
    basis = _basis(args.basis)
    if basis is None:
        payload["basis"] = "smith"
        payload["class"] = class_of(w, actx)
    else:
        spec = change_basis(actx, basis)
        payload["basis"] = [format_word(b) for b in spec.words]
        payload["class"] = coordinates(w, actx, spec)
    return payload


def cmd_action(args) -> dict:
    P = _extension(args)
    return {
        "modulus": args.mod,
        "mode": P.mode,
        "rank": P.rank,
        "basis": [format_word(b) for b in P.basis.words] if P.basis else "smith",
        "theta": {
            f"sigma_{x}": matrix_to_json(cryst.action_matrix(coset_of(BraidWord(3, (x,)), P.cosets), P))
            for x in (1, 2)
        },
    }


def cmd_torsion(args) -> dict:
    P = _extension(args)
    result = cryst.torsion_test(P, workers=args.workers)
    payload = {
        "modulus": args.mod,
        "mode": P.mode,
        "torsion_free": result.torsion_free,
        "witness_count": len(result.witnesses),
        "witness": None,
    }
    if result.witnesses:
        first = result.witnesses[0]
        payload["witness"] = {**first.to_json(), "braid": format_word(cryst.witness_word(P, first))}
    return payload


def cmd_verdict(args) -> dict:
    P = _extension(args)
    sub = _words(args.subgroup)
    if sub:
        P = cryst.sub_extension(P, cryst.cosets_generated_by(P, sub))
    payload = cryst.verdict_to_json(cryst.crystallographic_verdict(P, workers=args.workers))
    payload.update({"modulus": args.mod, "mode": P.mode})
    return payload


def cmd_witt(args) -> dict:
    payload = {"M": args.M, "k": args.k, "witt_rank": cryst.witt_rank(args.M, args.k)}
    if args.check_lyndon:
        # enumerates every Lyndon word of length k
        payload["lyndon_count"] = cryst.lyndon_count(args.M, args.k)
        payload["lyndon_matches"] = payload["lyndon_count"] == payload["witt_rank"]
    return payload


def cmd_hirsch(args) -> dict:
    return {"M": args.M, "k": args.k, "hirsch_length": cryst.hirsch_length(args.M, args.k)}


def cmd_rank_m(args) -> dict:
    return {"p": args.p, "M": cryst.rank_M(args.p)}


def cmd_fold(args) -> dict:
    gens = [fg.parse_free_word(line) for line in read_word_lines(args.gens)]
    G = fg.build_and_fold(gens, args.alphabet)
    payload = fg.to_json(G)
    payload["generators"] = [fg.format_free_word(g) for g in gens]
    payload["contains"] = {
        q: fg.contains(G, fg.parse_free_word(q)) for q in (args.contains or [])
    }
    if args.kernel_moduli:
        moduli = [int(v) for v in args.kernel_moduli.split(",")]
        if len(moduli) != args.alphabet:
            raise UnsupportedModeError(f"Need {args.alphabet} moduli, got {len(moduli)}")
        payload["kernel_check"] = fg.kernel_check(gens, moduli).to_json()
    return payload


def cmd_verify_paper(args) -> dict:
    workers = args.workers
    if workers is None and env_bool("BRAIDCRYST_PARALLEL"):
        workers = setting("verify", "workers")
    results = verify.run_checks(args.only, workers)
    args._table = verify.format_table(results)
    return {
        "passed": all(r.passed for r in results),
        "checks": [r.to_json() for r in results],
    }


# ============================================================================
# Parser
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--human", action="store_true", help="Print a readable summary instead of JSON")
    common.add_argument("--out", type=str, default=None, help="Also write the JSON report to this path")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="braidcryst",
        description="Congruence subgroups of B_3, their abelianizations and crystallographic quotients",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    def modes(p, basis=True):
        p.add_argument("--mod", type=int, required=True, help="Level m >= 2")
        p.add_argument("--mode", type=str, default="full-kernel", help=f"One of {', '.join(MODES)} (or full, center-quotient)")
        p.add_argument("--subgroup-gens", type=str, default=None, help="Generators of S for subgroup-preimage mode, ';'-separated")
        p.add_argument(
            "--letter-order", type=str, default=None,
            help="BFS letter order, e.g. --letter-order=-2,2,-1,1 (default 1,-1,2,-2)",
        )
        if basis:
            p.add_argument("--basis", type=str, default=None, help="File with one basis word per line")

    p = add("burau", cmd_burau, "Integral Burau image at t = -1")
    p.add_argument("--word", type=str, required=True)
    p.add_argument("--n", type=int, default=None, help="Strand count (default: largest index + 1)")
    p.add_argument("--reduced", action="store_true", help="Reduced instead of unreduced representation")
    p.add_argument("--mod", type=int, default=None)
    p.add_argument("--form", action="store_true", help="Invariant skew form of the reduced representation (odd n)")
    p.add_argument("--fixed", action="store_true", help="Common fixed vectors of the unreduced representation")

    p = add("member", cmd_member, "Membership in the congruence subgroup B_n[m]")
    p.add_argument("--word", type=str, required=True)
    p.add_argument("--n", type=int, default=None, help="Strand count (default: max(3, largest index + 1))")
    p.add_argument("--mod", type=int, required=True)

    p = add("image", cmd_image, "Enumerate rho_m(B_n)")
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--quotient-center", action="store_true")
    p.add_argument("--workers", type=int, default=None)

    p = add("abelianize", cmd_abelianize, "H_1 of a finite-index subgroup via Reidemeister-Schreier")
    modes(p, basis=False)

    p = add("class", cmd_class, "Coordinates of a subgroup element in H_1")
    p.add_argument("--word", type=str, required=True)
    modes(p)

    p = add("action", cmd_action, "Holonomy action matrices of s_1 and s_2")
    modes(p)

    p = add("torsion", cmd_torsion, "Torsion test of the crystallographic extension")
    modes(p)
    p.add_argument("--workers", type=int, default=None)

    p = add("verdict", cmd_verdict, "Crystallographic / Bieberbach verdict")
    modes(p)
    p.add_argument("--subgroup", type=str, default=None, help="Words generating a sub-extension, ';'-separated")
    p.add_argument("--workers", type=int, default=None)

    p = add("witt", cmd_witt, "Witt formula, optionally cross-checked against Lyndon words")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check-lyndon", action="store_true", help="Also count Lyndon words by brute force (exponential in k)")

    p = add("hirsch", cmd_hirsch, "Hirsch length of F_M / Gamma_k")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("rankM", cmd_rank_m, "M(p) = 1 + (p-1)p(p+1)/12")
    p.add_argument("--p", type=int, required=True)

    p = add("fold", cmd_fold, "Stallings folding of a free-group subgroup")
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--gens", type=str, required=True, help="File with one free word per line")
    p.add_argument("--contains", type=str, nargs="*", default=None, help="Words to test for membership")
    p.add_argument("--kernel-moduli", type=str, default=None, help="e.g. 2,2: certify the kernel onto Z/2 x Z/2")

    p = add("verify-paper", cmd_verify_paper, "Run every acceptance check")
    p.add_argument("--only", type=str, nargs="*", default=None, help=f"Subset of: {', '.join(c[0] for c in verify.CHECKS)}")
    p.add_argument("--workers", type=int, default=None)

    return parser


def _render_human(args, payload: dict) -> str:
    table = getattr(args, "_table", None)
    if table is not None:
        return table
    return yaml.safe_dump(to_jsonable(payload), sort_keys=False, allow_unicode=True).rstrip()


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    status = 0
    try:
        result = args.func(args)
        if args.command == "verify-paper" and not result["passed"]:
            status = 1
    except BraidCrystError as e:
        logger.error("❌ %s", e)
        status = e.exit_code
        result = {"error": str(e), "type": type(e).__name__}
        if isinstance(e, InvalidBasisError):
            result["determinant"] = e.determinant

    report = {"command": argv, "result": result, "exit_status": status}
    if args.out:
        write_json(report, Path(args.out))
        logger.info("✅ Report written to %s", args.out)
    print(_render_human(args, result) if args.human else dumps_json(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
