"""Command-line front end.

Exit codes: 0 consistent or inapplicable, 10 obstructed, 2 parse or input
validation errors, 3 domain errors, 4 unknown catalog or example names.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from prometheus_client import generate_latest
from pydantic import ValidationError

from .config import DEFAULT_CUTOFF, DEFAULT_MAGNUS_CAP, DEFAULT_MILNOR_CAP, RunConfig
from .errors import BadParameter, DomainError, IndexOutOfRange, ObstructError, ParseError
from .exactalg import INFINITE
from .families import ExampleResult, build_member, run_example
from .links import LinkCatalogEntry, catalog, entry_from_words
from .magnus import milnor_degree, mu_bar
from .manifold import (
    DescriptorOptions,
    ManifoldDescriptor,
    SurgeryPresentation,
    descriptor_from_seifert,
    descriptor_from_surgery,
    seifert_linking_form,
)
from .obstruct import ObstructionReport, obstruct
from .observability import REGISTRY, configure_logging, logger, structured_log
from .schemas import (
    SCHEMA_MODELS,
    CustomLinkModel,
    DescriptorModel,
    DistinctionReportModel,
    ExampleReportModel,
    ExampleRowModel,
    LinkingFormModel,
    LinkReportModel,
    MilnorDegreeModel,
    MuValueModel,
    ObstructionReportModel,
    SeifertReportModel,
    schema_document,
    write_schemas,
)
from .seifert import (
    betti_one,
    euler_number,
    first_homology,
    format_seifert,
    fundamental_group_presentation,
    has_two_torsion,
    parse_seifert,
    rational_cohomology_type,
    regular_fiber_order,
)

EXIT_OK = 0
EXIT_OBSTRUCTED = 10
EXIT_PARSE = 2

FAMILY_FLAGS = ("d", "m", "k", "r", "p", "torsion")


def parse_params(items: Optional[Sequence[str]]) -> Dict[str, str]:
    params: Dict[str, str] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ParseError(f"bad parameter {item!r}", text=item, position=len(item), expected="key=value")
        params[key.strip()] = value.strip()
    return params


def parse_multi_index(text: str) -> Tuple[int, ...]:
    text = text.strip()
    try:
        if "," in text:
            return tuple(int(piece) for piece in text.split(","))
        return tuple(int(ch) for ch in text)
    except ValueError:
        raise IndexOutOfRange(
            f"bad multi-index {text!r}, expected digits like 123 or 1,2,10", index=text
        ) from None


def parse_framing(text: str, components: int) -> Tuple[int, ...]:
    text = text.strip()
    try:
        if text.startswith("p="):
            return (int(text[2:]),) * components
        if "," in text:
            values = tuple(int(piece) for piece in text.split(","))
        else:
            values = (int(text),) * components
    except ValueError:
        raise ParseError(f"bad framing {text!r}", text=text, position=0, expected="0, p=P or a list f1,f2,...") from None
    if len(values) != components:
        raise BadParameter(f"expected {components} framings, got {len(values)}")
    return values


def load_custom_link(path: Path) -> LinkCatalogEntry:
    with path.open("r", encoding="utf-8") as fh:
        model = CustomLinkModel.model_validate(json.load(fh))
    return entry_from_words(model.name, model.linking_matrix, model.longitudes)


def _family_params(args: argparse.Namespace) -> Dict[str, str]:
    return {flag: getattr(args, flag) for flag in FAMILY_FLAGS if getattr(args, flag, None) is not None}


def _emit(out: TextIO, config: RunConfig, model, lines: List[str]) -> None:
    if config.output_format == "json":
        out.write(model.model_dump_json(indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def _degree_text(model: Optional[MilnorDegreeModel]) -> str:
    if model is None:
        return "n/a"
    return str(model.value) if model.exact else f">= {model.value}"


def _linking_lines(model: Optional[LinkingFormModel]) -> List[str]:
    if model is None:
        return []
    if not model.torsion:
        return ["linking form: trivial"]
    lines = [f"linking form on {' + '.join(f'Z/{d}' for d in model.torsion)}:"]
    for row in model.gram:
        lines.append("  [" + ", ".join(f"{n}/{d}" if n else "0" for n, d in row) + "]")
    return lines


def cmd_sfs(config: RunConfig, with_linking_form: bool, out: TextIO) -> int:
    s = parse_seifert(config.notation)
    group = first_homology(s)
    order = regular_fiber_order(s)
    ring = rational_cohomology_type(s)
    model = SeifertReportModel(
        notation=format_seifert(s),
        presentation=fundamental_group_presentation(s).format(),
        homology=group.describe(),
        beta1=betti_one(s),
        torsion=list(group.torsion),
        fiber_order=None if order == INFINITE else int(order),
        two_torsion=has_two_torsion(s),
        euler_number=str(euler_number(s)) if s.base_orientable else None,
        ring_type=ring.describe(),
        linking_form=LinkingFormModel.from_form(seifert_linking_form(s)) if with_linking_form else None,
    )
    lines = [
        f"seifert:      {model.notation}",
        f"pi_1:         {model.presentation}",
        f"H_1:          {model.homology}",
        f"beta1:        {model.beta1}",
        f"fiber order:  {'infinite' if model.fiber_order is None else model.fiber_order}",
        f"2-torsion:    {'yes' if model.two_torsion else 'no'}",
        f"euler number: {model.euler_number if model.euler_number is not None else 'n/a (non-orientable base)'}",
        f"ring type:    {model.ring_type}",
        *_linking_lines(model.linking_form),
    ]
    _emit(out, config, model, lines)
    return EXIT_OK


def _resolve_link(config: RunConfig) -> LinkCatalogEntry:
    if config.json_path is not None:
        return load_custom_link(config.json_path)
    return catalog(config.catalog_name, config.parameters)


def cmd_link(config: RunConfig, mu_indices: Sequence[str], with_degree: bool, out: TextIO) -> int:
    link = _resolve_link(config)
    indices = [parse_multi_index(text) for text in mu_indices]
    values: List[MuValueModel] = []
    if indices:
        longest = max(len(index) for index in indices)
        if longest - 1 > config.magnus_cap:
            raise DomainError(f"multi-index of length {longest} needs Magnus degree {longest - 1} > cap {config.magnus_cap}")
        for index in indices:
            value = mu_bar(link.longitudes, index)
            values.append(MuValueModel(index=list(index), value=value.value, modulus=value.modulus))
    degree = MilnorDegreeModel.from_degree(milnor_degree(link.longitudes, config.milnor_cap)) if with_degree else None
    model = LinkReportModel(
        name=link.name,
        components=link.components,
        linking_matrix=link.linking_matrix.to_rows(),
        longitudes=link.longitude_strings(),
        mu=values,
        milnor_degree=degree,
    )
    lines = [
        f"link:           {model.name} ({model.components} components)",
        f"linking matrix: {model.linking_matrix}",
        *[f"longitude {i + 1}:    {word}" for i, word in enumerate(model.longitudes)],
        *[
            f"mu-bar({''.join(map(str, v.index)) if max(v.index) < 10 else ','.join(map(str, v.index))}) = {v.value}"
            + (f" mod {v.modulus}" if v.modulus else "")
            for v in values
        ],
    ]
    if degree is not None:
        lines.append(f"milnor degree:  {_degree_text(degree)}")
    _emit(out, config, model, lines)
    return EXIT_OK


def _report_lines(report: ObstructionReport, descriptor: ManifoldDescriptor) -> List[str]:
    model = DescriptorModel.from_descriptor(descriptor)
    lines = [
        f"verdict:        {report.verdict.value}",
        f"beta1:          {model.beta1}",
        f"torsion:        {model.torsion or 'none'}",
        f"milnor degree:  {_degree_text(model.milnor_degree)}",
        f"massey degree:  {_degree_text(model.massey_degree)}",
    ]
    lines += [f"fired {rule.tag}: {rule.witness}" for rule in report.fired_rules]
    lines += [f"note: {note}" for note in report.notes]
    return lines


def _build_descriptor(config: RunConfig, framing: Optional[str], family: Dict[str, str]) -> ManifoldDescriptor:
    options = DescriptorOptions(milnor_cap=config.milnor_cap)
    if config.notation is not None:
        return descriptor_from_seifert(parse_seifert(config.notation))
    if config.example is not None:
        return build_member(config.example, family, config.milnor_cap)
    link = _resolve_link(config)
    if framing is not None:
        link = link.with_framings(parse_framing(framing, link.components), name=f"{link.name}[framing {framing}]")
    return descriptor_from_surgery(SurgeryPresentation.from_link(link), options)


def cmd_obstruct(config: RunConfig, framing: Optional[str], family: Dict[str, str], out: TextIO) -> int:
    descriptor = _build_descriptor(config, framing, family)
    report = obstruct(descriptor)
    model = ObstructionReportModel.from_report(report, descriptor)
    _emit(out, config, model, _report_lines(report, descriptor))
    return EXIT_OBSTRUCTED if report.obstructed else EXIT_OK


def _example_model(result: ExampleResult) -> ExampleReportModel:
    rows = []
    for row in result.rows:
        d = row.descriptor
        rows.append(
            ExampleRowModel(
                label=row.label,
                beta1=d.beta1,
                torsion=list(d.torsion.torsion),
                verdict=row.report.verdict.value,
                rules=row.report.tags,
                milnor_degree=MilnorDegreeModel.from_degree(d.milnor_degree),
            )
        )
    return ExampleReportModel(
        example=result.name,
        claim=result.claim,
        rows=rows,
        distinctions=[DistinctionReportModel.from_report(report) for _, _, report in result.distinctions],
        notes=list(result.notes),
    )


def cmd_examples(config: RunConfig, family: Dict[str, str], out: TextIO) -> int:
    result = run_example(config.example, family, config.milnor_cap, config.cutoff)
    model = _example_model(result)
    lines = [f"{model.example}: {model.claim}", f"{'member':<12}{'beta1':>6}  {'torsion':<14}{'milnor':>8}  verdict"]
    for row in model.rows:
        lines.append(
            f"{row.label:<12}{row.beta1:>6}  {str(row.torsion or '-'):<14}{_degree_text(row.milnor_degree):>8}  "
            f"{row.verdict} {' '.join(row.rules)}".rstrip()
        )
    for (first, second, _), report in zip(result.distinctions, model.distinctions):
        via = ", ".join(e.invariant for e in report.evidence) or "no distinguishing invariant"
        lines.append(f"{first} vs {second}: {'distinct' if report.distinct else 'not distinguished'} ({via})")
    lines += [f"note: {note}" for note in model.notes]
    _emit(out, config, model, lines)
    return EXIT_OK


def cmd_schema(model_name: str, write_dir: Optional[str], out: TextIO) -> int:
    if write_dir is not None:
        for path in write_schemas(Path(write_dir)):
            out.write(f"{path}\n")
        return EXIT_OK
    out.write(json.dumps(schema_document(model_name), indent=2) + "\n")
    return EXIT_OK


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", dest="output_format", choices=("text", "json"), default=None)
    parser.add_argument("--log-level", default="WARNING")
    parser.add_argument("--metrics", action="store_true", help="print the metrics registry to stderr")
    parser.add_argument("--cap", type=int, default=DEFAULT_MILNOR_CAP, help="Milnor length cap")
    parser.add_argument("--magnus-cap", type=int, default=DEFAULT_MAGNUS_CAP)
    parser.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)


def _family(parser: argparse.ArgumentParser) -> None:
    for flag in FAMILY_FLAGS:
        parser.add_argument(f"--{flag}", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seifert-obstruct", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sfs = sub.add_parser("sfs", help="invariants of a Seifert fibered space")
    sfs.add_argument("notation")
    sfs.add_argument("--linking-form", action="store_true")
    _common(sfs)

    link = sub.add_parser("link", help="linking matrix and Milnor invariants of a link")
    link.add_argument("name", nargs="?")
    link.add_argument("--json", dest="json_path", type=Path)
    link.add_argument("--param", action="append", default=[])
    link.add_argument("--mu", action="append", default=[])
    link.add_argument("--degree", action="store_true")
    _common(link)

    obs = sub.add_parser("obstruct", help="run the obstruction checks")
    obs.add_argument("--surgery")
    obs.add_argument("--sfs")
    obs.add_argument("--json", dest="json_path", type=Path)
    obs.add_argument("--example")
    obs.add_argument("--param", action="append", default=[])
    obs.add_argument("--framing")
    _family(obs)
    _common(obs)

    ex = sub.add_parser("examples", help="reproduce a family of examples")
    ex.add_argument("example")
    _family(ex)
    _common(ex)

    schema = sub.add_parser("schema", help="print a JSON schema")
    schema.add_argument("--model", choices=sorted(SCHEMA_MODELS), default="descriptor")
    schema.add_argument("--write", metavar="DIR", help="write every schema into DIR instead of printing one")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    values = {
        "command": args.command,
        "output_format": getattr(args, "output_format", None),
        "milnor_cap": getattr(args, "cap", DEFAULT_MILNOR_CAP),
        "magnus_cap": getattr(args, "magnus_cap", DEFAULT_MAGNUS_CAP),
        "cutoff": getattr(args, "cutoff", DEFAULT_CUTOFF),
        "parameters": parse_params(getattr(args, "param", None)),
    }
    if args.command == "sfs":
        values["notation"] = args.notation
    elif args.command == "link":
        values["catalog_name"] = args.name
        values["json_path"] = args.json_path
    elif args.command == "obstruct":
        values.update(notation=args.sfs, catalog_name=args.surgery, json_path=args.json_path, example=args.example)
    elif args.command == "examples":
        values["example"] = args.example
    return RunConfig.from_env(**values)


def run(args: argparse.Namespace, out: TextIO) -> int:
    if args.command == "schema":
        return cmd_schema(args.model, args.write, out)
    config = _config(args)
    structured_log("cli_command", command=config.command, output_format=config.output_format)
    if config.command == "sfs":
        return cmd_sfs(config, args.linking_form, out)
    if config.command == "link":
        return cmd_link(config, args.mu, args.degree, out)
    if config.command == "obstruct":
        return cmd_obstruct(config, args.framing, _family_params(args), out)
    return cmd_examples(config, _family_params(args), out)


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "log_level", "WARNING"), stream=err)
    try:
        code = run(args, out)
    except ParseError as exc:
        err.write(f"parse error: {exc.detail}\n{exc.caret()}\n")
        code = exc.exit_code
    except ObstructError as exc:
        err.write(json.dumps(exc.as_dict(), default=str) + "\n")
        code = exc.exit_code
    except ValidationError as exc:
        err.write(f"invalid input: {exc}\n")
        code = EXIT_PARSE
    except (OSError, json.JSONDecodeError) as exc:
        err.write(f"cannot read input: {exc}\n")
        code = EXIT_PARSE
    logger.debug("exit code %s", code)
    if getattr(args, "metrics", False):
        err.write(generate_latest(REGISTRY).decode("utf-8"))
    return code
