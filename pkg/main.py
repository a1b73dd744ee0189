#!/usr/bin/env python3
"""
latclass: even lattices, finite quadratic forms and involutions of K3^[n]-type
Command-line driver for discriminant forms, classifications, walls and twisted examples
"""

import argparse
import logging
import os
import sys
from fractions import Fraction
from typing import List, Optional

import numpy as np

from src.classification import (
    classify_rank1,
    classify_rank2,
    find_family,
    maximal_families,
    two_square_representations,
)
from src.config_manager import ConfigManager
from src.embeddings import (
    GenusTag,
    embed_Ln_in_mukai,
    genus_match,
    rank1_embedding_classes,
    vectors_of_square,
)
from src.errors import EnumerationBoundError, ExpressionSyntaxError, IntegralityError, LatticeError
from src.expression_parser import build_lattice, parse_lattice, random_expressions
from src.finite_forms import (
    FiniteQuadraticForm,
    is_isomorphic,
    milgram_signature,
    perp_mod_H,
    subgroups,
)
from src.lattice import Lattice, PrimitiveSublattice, k3n_lattice, orthogonal_complement
from src.mukai import BField, MukaiVector, double_plane_example, moduli_invariants, polarized_example, twist
from src.report import (
    Document,
    chamber_row,
    family_row,
    form_rows,
    lattice_summary,
    moduli_family_row,
    render,
    wall_rows,
)
from src.walls import count_chambers, wall_pair_search, wall_pairs, walls_in_T

logger = logging.getLogger("latclass")

EXAMPLES = ("polarized", "double-plane")
EXAMPLE_ALIASES = {"5.1": "polarized", "5.3": "double-plane"}
N5_WALL_TABLE = [(-2, 1), (-8, 2), (-16, 2), (-8, 4), (-40, 4), (-8, 8), (-72, 8), (-136, 8), (-200, 8)]
RANK2_ROWS = {
    (2, -1): {"hyperbolic", "u2", "a1a1", "a1a1-cyclic"},
    (3, -1): {"hyperbolic", "u2", "a1a1", "u2-glued"},
    (4, -1): {"hyperbolic", "u2", "a1a1", "a1a1-cyclic"},
    (5, -1): {"hyperbolic", "u2", "a1a1", "u2-glued", "a1a1-odd"},
    (2, 1): {"split", "split-u2", "hyperbolic-plus", "u2-plus"},
    (3, 1): {"split", "split-u2"},
    (4, 1): {"split", "split-u2"},
    (5, 1): {"split", "split-u2"},
}
MAXIMAL_FAMILIES = {
    2: {"t2-div1": 1, "u2": 1},
    3: {"t2-div1": 1, "t2n": 1, "u2": 1},
    4: {"t2-div1": 1, "t2-div2": 1, "u2": 1},
    5: {"t2-div1": 1, "u2": 1, "u2-glued": 3},
}
DEFINITE_TARGETS = (
    ((2, 0), (0, 2)),
    ((2, 1), (1, 2)),
    ((2, 0, 0), (0, 2, 0), (0, 0, 2)),
)


def _status(ok: bool, message: str):
    print(f"{'✓' if ok else '✗'} {message}", file=sys.stderr)


class LatticeClassifier:
    """
    Engine behind the command line.

    Reads bounds and precision from the configuration, runs one command and
    returns a Document ready for rendering.
    """

    def __init__(self, config_file: Optional[str] = None, preset: Optional[str] = None,
                 bound: Optional[int] = None, seed: Optional[int] = None):
        self.config_manager = ConfigManager()
        self.config_manager.apply_environment(os.environ)

        if config_file and not self.config_manager.load_config_file(config_file):
            _status(False, f"failed to load config file '{config_file}', using defaults")
        if preset and not self.config_manager.load_preset(preset):
            _status(False, f"failed to load preset '{preset}', using current config")
        if bound is not None:
            self.config_manager.set_config("search", "bound", bound)
        if seed is not None:
            self.config_manager.set_config("output", "seed", seed)

        self.enumeration_config = self.config_manager.get_enumeration_config()
        self.search_config = self.config_manager.get_search_config()
        self.precision_config = self.config_manager.get_precision_config()
        self.output_config = self.config_manager.get_output_config()

        self.group_bound = self.enumeration_config.get("group_order_bound", 4096)
        self.subgroup_bound = self.enumeration_config.get("subgroup_order_bound", self.group_bound)
        self.rng = np.random.default_rng(self.output_config.get("seed", 0))
        logger.debug("engine ready: preset %s, group bound %d",
                     self.config_manager.get_current_preset(), self.group_bound)

    # -- commands ---------------------------------------------------------

    def discriminant(self, text: str) -> Document:
        lattice = build_lattice(parse_lattice(text))
        form = lattice.discriminant_form
        residue = milgram_signature(form, self.precision_config.get("gauss_digits", 50),
                                    self.precision_config.get("gauss_tolerance", "1e-20"),
                                    self.group_bound)
        params = {"expression": text, **lattice_summary(lattice), "gauss_signature": residue}
        _status(residue == lattice.signature.value % 8, f"Milgram congruence for {lattice}")
        return Document("discr", params, form_rows(form))

    def classify(self, n: int, rank: Optional[int] = None, action: Optional[int] = None) -> Document:
        records = []
        if rank in (None, 1):
            records += [r for r in classify_rank1(n, self.group_bound)
                        if r.exists and (action is None or r.action == action)]
        if rank in (None, 2):
            for sign in (-1, 1):
                if action in (None, sign):
                    records += classify_rank2(n, sign, self.group_bound)
        verified = all(r.verified for r in records)
        _status(verified, f"{len(records)} families for n = {n}")
        params = {"n": n, "rank": rank, "action": action}
        return Document("classify", params, [family_row(r) for r in records], exhaustive=verified)

    def walls(self, n: int) -> Document:
        search = wall_pair_search(n, self.search_config.get("wall_index_bound"))
        _status(search.exhaustive, f"{len(search.pairs)} wall pairs for n = {n}")
        return Document("walls", {"n": n}, wall_rows(search.pairs), exhaustive=search.exhaustive)

    def chambers(self, n: int, family_id: str) -> Document:
        record = find_family(n, family_id, self.group_bound)
        if record.invariant is None:
            raise EnumerationBoundError(f"family {family_id} has no explicit representative for n = {n}")
        search = walls_in_T(record.invariant, wall_pairs(n, self.search_config.get("wall_index_bound")),
                            self.search_config.get("bound"), self.search_config.get("doubling_check", True))
        report = count_chambers(record.invariant, search.walls, search.exhaustive)
        _status(report.exhaustive, f"{report.chambers} chambers in {record.t_display}")
        params = {"n": n, "family": family_id, "bound": search.bound}
        return Document("chambers", params, [chamber_row(record, report)],
                        exhaustive=report.exhaustive, separation=report.separation)

    def twisted(self, example: str, n: Optional[int]) -> Document:
        example = EXAMPLE_ALIASES.get(example, example)
        if example == "polarized":
            if n is None:
                raise LatticeError("the polarized example needs --n")
            built, family_id = polarized_example(n), "u2"
        elif example == "double-plane":
            built, family_id = double_plane_example(), "u2-glued"
        else:
            raise LatticeError(f"unknown example {example!r}; choose from {', '.join(EXAMPLES)}")
        invariants = moduli_invariants(built.data, built.twisted)
        record = find_family(invariants.n, family_id, self.group_bound)
        matches = genus_match(invariants.picard.lattice, record.t_genus, self.group_bound) and genus_match(
            invariants.transcendental.lattice, record.s_genus, self.group_bound
        )
        _status(matches, f"{example} example matches family {family_id}")
        row = {
            "example": example,
            "n": invariants.n,
            "v": str(built.vector),
            "v_B": str(built.twisted),
            "v_B_square": built.twisted.square(),
            "picard_gram": [list(r) for r in invariants.picard.gram],
            "picard": GenusTag.of(invariants.picard.lattice).describe(),
            "transcendental": GenusTag.of(invariants.transcendental.lattice).describe(),
            "matches_family": family_id if matches else None,
        }
        return Document("twisted", {"example": example, "n": n}, [row])

    def families(self, n: int) -> Document:
        found = maximal_families(
            n,
            self.search_config.get("containment_box", 12),
            self.search_config.get("bound"),
            self.search_config.get("doubling_check", True),
            self.group_bound,
        )
        exhaustive = all(f.chambers is None or f.chambers.exhaustive for f in found)
        separation = all(f.chambers is None or f.chambers.separation for f in found)
        _status(exhaustive, f"{len(found)} maximal families for n = {n}")
        params = {
            "n": n,
            "bound": self.search_config.get("bound"),
            "doubling_check": self.search_config.get("doubling_check", True),
            "group_order_bound": self.group_bound,
        }
        return Document("families", params, [moduli_family_row(f) for f in found],
                        exhaustive=exhaustive, separation=separation)

    def check(self) -> Document:
        rows = []
        for name, runner in self._checks():
            try:
                passed, detail = runner()
            except LatticeError as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            _status(passed, f"{name}: {detail}")
            rows.append({"check": name, "passed": passed, "detail": detail})
        return Document("check", {"seed": self.output_config.get("seed", 0)}, rows,
                        passed=all(r["passed"] for r in rows))

    # -- acceptance checks ------------------------------------------------

    def _checks(self):
        return [
            ("discriminant-forms", self._check_discriminant_forms),
            ("epw-glue", self._check_epw_glue),
            ("rank-one", self._check_rank_one),
            ("rank-two", self._check_rank_two),
            ("wall-table", self._check_wall_table),
            ("chambers", self._check_chambers),
            ("maximal-families", self._check_maximal_families),
            ("twisted", self._check_twisted),
            ("milgram", self._check_milgram),
            ("reflections", self._check_reflections),
            ("embedding-oracle", self._check_embedding_oracle),
            ("twist-squares", self._check_twist_squares),
        ]

    def _check_discriminant_forms(self):
        for n in range(2, 11):
            twice = 2 * (n - 1)
            if not is_isomorphic(k3n_lattice(n).discriminant_form,
                                 FiniteQuadraticForm.cyclic(twice, Fraction(-1, twice))):
                return False, f"A_L for n = {n}"
            embedding = embed_Ln_in_mukai(n)
            complement = orthogonal_complement(embedding.sublattice).lattice
            if complement.gram != ((twice,),):
                return False, f"complement in M for n = {n}"
        return True, "n = 2..10"

    def _check_epw_glue(self):
        source = FiniteQuadraticForm.cyclic(4, Fraction(1, 4))
        side = FiniteQuadraticForm.cyclic(2, Fraction(-1, 2))
        total = source.direct_sum(side).direct_sum(side)
        glues = [
            H for H in subgroups(total, self.subgroup_bound, self.group_bound)
            if H.order == 2 and H.is_isotropic()
            and all(x[0] and any(x[1:]) for x in H.elements if any(x))
        ]
        if len(glues) != 1 or glues[0].generators[0] != (2, 1, 1):
            return False, f"{len(glues)} glue subgroups"
        quotient = perp_mod_H(total, glues[0], self.group_bound)
        ok = is_isomorphic(quotient, FiniteQuadraticForm.cyclic(4, Fraction(-1, 4)))
        return ok, f"a = 1, H-perp/H = {quotient.describe()}"

    def _check_rank_one(self):
        t2n = {n for n in range(2, 11) if any(r.family_id == "t2n" and r.exists for r in classify_rank1(n))}
        div2 = {n for n in range(2, 11) if any(r.family_id == "t2-div2" and r.exists for r in classify_rank1(n))}
        expected = {n for n in range(2, 11) if two_square_representations(n - 1)}
        unverified = [(n, r.family_id) for n in range(2, 11) for r in classify_rank1(n)
                      if r.exists and not r.verified]
        ok = t2n == expected == {2, 3, 6} and div2 == {4, 8} and not unverified
        return ok, f"t2n at {sorted(t2n)}, t2-div2 at {sorted(div2)}"

    def _check_rank_two(self):
        for (n, action), wanted in RANK2_ROWS.items():
            records = classify_rank2(n, action)
            if {r.family_id for r in records} != wanted or not all(r.verified for r in records):
                return False, f"n = {n}, action {action:+d}"
        return True, "n = 2..5, both actions"

    def _check_wall_table(self):
        pairs = [(p.square, p.divisibility) for p in wall_pairs(5)]
        if pairs != N5_WALL_TABLE:
            return False, f"n = 5 gives {pairs}"
        for n in range(2, 6):
            if any(p.divisibility == 1 and p.square != -2 for p in wall_pairs(n)):
                return False, f"divisibility-one wall off -2 at n = {n}"
        return True, "9 rows at n = 5"

    def _check_chambers(self):
        for n in range(2, 6):
            T = find_family(n, "u2").invariant
            report = count_chambers(T, walls_in_T(T, wall_pairs(n)).walls)
            if report.chambers != 1:
                return False, f"u2 at n = {n} has {report.chambers} chambers"
        T = find_family(5, "u2-glued").invariant
        search = walls_in_T(T, wall_pairs(5))
        report = count_chambers(T, search.walls, search.exhaustive)
        pairs = sorted((w.square, w.divisibility) for w in report.walls)
        ok = pairs == [(-16, 2), (-8, 2)] and report.chambers == 3 and report.orbits == 3 and report.separation
        return ok, f"u2-glued at n = 5: walls {pairs}, {report.chambers} chambers"

    def _check_maximal_families(self):
        for n, wanted in MAXIMAL_FAMILIES.items():
            found = {f.record.family_id: f.components for f in maximal_families(n)}
            if found != wanted:
                return False, f"n = {n}: {found}"
        return True, "n = 2..5"

    def _check_twisted(self):
        for n in range(2, 6):
            built = polarized_example(n)
            invariants = moduli_invariants(built.data, built.twisted)
            record = find_family(n, "u2")
            if not (genus_match(invariants.picard.lattice, record.t_genus)
                    and genus_match(invariants.transcendental.lattice, record.s_genus)):
                return False, f"polarized example at n = {n}"
        built = double_plane_example()
        invariants = moduli_invariants(built.data, built.twisted)
        ok = (invariants.n == 5 and built.twisted.square() == 8
              and genus_match(invariants.picard.lattice, GenusTag.from_expression("U(2)"))
              and genus_match(invariants.transcendental.lattice, GenusTag.from_expression("2*U + 2*E8 + <-8>")))
        return ok, "polarized n = 2..5 and double plane"

    def _check_milgram(self):
        digits = self.precision_config.get("gauss_digits", 50)
        tolerance = self.precision_config.get("gauss_tolerance", "1e-20")
        checked = skipped = 0
        for expression in random_expressions(self.rng, 2000, kinds=("U", "<>", "E8"), max_terms=3):
            if checked >= 200:
                break
            lattice = build_lattice(expression)
            # |A_L| = |det L|
            if abs(lattice.determinant) > self.group_bound:
                skipped += 1
                continue
            residue = milgram_signature(lattice.discriminant_form, digits, tolerance, self.group_bound)
            if residue != lattice.signature.value % 8:
                return False, f"{expression}: Gauss sum {residue}, signature {lattice.signature}"
            checked += 1
        return checked >= 200, f"{checked} lattices, {skipped} over the group bound"

    def _check_reflections(self):
        count = 0
        for n in range(2, 6):
            records = [r for r in classify_rank1(n) if r.exists] + classify_rank2(n, -1) + classify_rank2(n, 1)
            for record in records:
                involution = record.involution
                if involution is None:
                    return False, f"{record.family_id} at n = {n} has no involution"
                fixed = all(involution.apply(t) == t for t in involution.invariant.basis)
                negated = all(involution.apply(s) == tuple(-x for x in s) for s in involution.coinvariant.basis)
                if not (fixed and negated):
                    return False, f"{record.family_id} at n = {n}"
                count += 1
        return True, f"{count} involutions"

    def _check_embedding_oracle(self):
        compared = 0
        for gram in DEFINITE_TARGETS:
            target = Lattice(gram)
            for k in (1, 2, 3):
                classes = [c.complement_form for c in rank1_embedding_classes(k, target, self.group_bound)]
                vectors = vectors_of_square(target, 2 * k).vectors
                found = [
                    orthogonal_complement(PrimitiveSublattice(target, (v,))).lattice.discriminant_form
                    for v in vectors
                ]
                covered = all(any(is_isomorphic(a, b) for b in classes) for a in found)
                realized = all(any(is_isomorphic(a, b) for b in found) for a in classes)
                if not (covered and realized):
                    return False, f"<{2 * k}> into {target}"
                compared += 1
        return True, f"{compared} definite cases"

    def _check_twist_squares(self):
        checked = 0
        while checked < 1000:
            r = int(self.rng.integers(-4, 5))
            H = tuple(int(x) for x in self.rng.integers(-3, 4, size=22))
            s = int(self.rng.integers(-5, 6))
            b_field = BField(tuple(int(x) for x in self.rng.integers(0, 2, size=22)))
            v = MukaiVector(r, H, s)
            try:
                twisted = twist(v, b_field)
            except IntegralityError:
                continue
            if twisted.square() != v.square():
                return False, f"twist of {v} changes the square"
            checked += 1
        return True, f"{checked} twists"


def _add_common_options(parser: argparse.ArgumentParser, suppress: bool = False):
    """Global flags; the copies on each subcommand default to SUPPRESS."""
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--format", choices=["json", "tsv"], default=default,
                        help="Output format (default from config)")
    parser.add_argument("--bound", type=int, default=default, help="Coordinate box for indefinite searches")
    parser.add_argument("--seed", type=int, default=default, help="Seed for the randomized check corpora")
    parser.add_argument("--out", type=str, default=default, help="Write output to this file instead of stdout")
    parser.add_argument("--config", "-c", type=str, default=default, help="Configuration file to load")
    parser.add_argument("--preset", "-p", type=str, default=default, help="Preset (quick, thorough)")
    parser.add_argument("--verbose", "-v", action="store_true",
                        default=argparse.SUPPRESS if suppress else False, help="Debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latclass",
        description="latclass: even lattices and non-symplectic involutions of K3^[n]-type",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py discr "2*U + 2*E8 + <-2>"
  python main.py classify --n 5 --rank 2 --action -1
  python main.py walls --n 5 --format tsv
  python main.py chambers --n 5 --family u2-glued
  python main.py twisted --example polarized --n 3
  python main.py check --all --preset quick
        """,
    )
    _add_common_options(parser)
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, suppress=True)

    commands = parser.add_subparsers(dest="command", required=True)

    discr = commands.add_parser("discr", parents=[common], help="Discriminant form of a lattice expression")
    discr.add_argument("expression", help='Lattice expression, e.g. "U + U(2) + 2*E8 + <-8>"')

    classify = commands.add_parser("classify", parents=[common], help="Rank-one and rank-two invariant lattices")
    classify.add_argument("--n", type=int, required=True)
    classify.add_argument("--rank", type=int, choices=[1, 2])
    classify.add_argument("--action", type=int, choices=[-1, 1])

    walls = commands.add_parser("walls", parents=[common], help="Admissible (square, divisibility) wall pairs")
    walls.add_argument("--n", type=int, required=True)

    chambers = commands.add_parser("chambers", parents=[common], help="Kähler-type chambers of a rank-two family")
    chambers.add_argument("--n", type=int, required=True)
    chambers.add_argument("--family", type=str, required=True)

    twisted = commands.add_parser("twisted", parents=[common], help="Moduli of twisted sheaves")
    twisted.add_argument("--example", choices=EXAMPLES + tuple(EXAMPLE_ALIASES), required=True)
    twisted.add_argument("--n", type=int)

    check = commands.add_parser("check", parents=[common], help="Run the acceptance suite")
    check.add_argument("--all", action="store_true", help="Run every check (the default)")

    families = commands.add_parser("families", parents=[common],
                                   help="Families of maximal dimension with component counts")
    families.add_argument("--n", type=int, required=True)
    return parser


def _dispatch(engine: LatticeClassifier, args) -> Document:
    if args.command == "discr":
        return engine.discriminant(args.expression)
    if args.command == "classify":
        return engine.classify(args.n, args.rank, args.action)
    if args.command == "walls":
        return engine.walls(args.n)
    if args.command == "chambers":
        return engine.chambers(args.n, args.family)
    if args.command == "twisted":
        return engine.twisted(args.example, args.n)
    if args.command == "families":
        return engine.families(args.n)
    return engine.check()


def run_command(argv: Optional[List[str]] = None) -> int:
    """Run one command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2

    try:
        engine = LatticeClassifier(args.config, args.preset, args.bound, args.seed)
    except LatticeError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    level = "DEBUG" if args.verbose else engine.config_manager.get_logging_config().get("level", "WARNING")
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, str(level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", force=True)

    try:
        document = _dispatch(engine, args)
    except ExpressionSyntaxError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except LatticeError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.debug("unexpected failure", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return 1

    fmt = args.format or engine.output_config.get("format", "json")
    text = render(document, fmt)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
        _status(True, f"output written to {args.out}")
    else:
        print(text)

    if document.passed is False:
        return 1
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
