import hashlib
import json
import re
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
from pydantic import BaseModel, ValidationError

from errors import (
    InternalInvariantError,
    InvalidArgument,
    KanTowerError,
    PresentationFormatError,
    SpaceFormatError,
)
from fixtures import FIXTURE_DIR, fixture_check
from hall_lie import cross_effect_complex, cross_effect_kernel, hall_basis, witt_rank
from kan_tower import layer_homotopy, loop_group, pi0, tower_stage
from logs import configure_logging, log_event
from models import (
    VERB_INPUTS,
    VERB_OPTIONS,
    Command,
    PresentationFile,
    Report,
    SpaceFile,
    canonical_json,
)
from nilpotent import FreeWord, Presentation, check_hall_rank, collect, nilpotent_quotient
from simplicial import (
    NondegenerateSimplex,
    SimplexRef,
    SimplicialSet,
    reduced_homology,
    structural_violations,
    validate,
)
from spaces import standard_space


def _describe(violation) -> str:
    return f"{violation.identity} violated at {violation.simplex}: {violation.detail}"


def _schema_message(error: ValidationError) -> str:
    first = error.errors()[0]
    where = ".".join(str(p) for p in first["loc"])
    return f"{where}: {first['msg']}" if where else first["msg"]


_WHITESPACE = re.compile(r"\s*")
_DECODER = json.JSONDecoder()


def _child(text: str, pos: int, step: Any) -> Optional[int]:
    """Offset of the member ``step`` of the array or object starting at ``pos``."""
    opener = text[pos:pos + 1]
    if opener not in ("[", "{"):
        return None
    closer = "]" if opener == "[" else "}"
    i = _WHITESPACE.match(text, pos + 1).end()
    index = 0
    while i < len(text) and text[i] != closer:
        if opener == "{":
            key, i = _DECODER.raw_decode(text, i)
            i = _WHITESPACE.match(text, i).end() + 1
            i = _WHITESPACE.match(text, i).end()
            if key == step:
                return i
        elif index == step:
            return i
        _, i = _DECODER.raw_decode(text, i)
        i = _WHITESPACE.match(text, i).end()
        if text[i:i + 1] == ",":
            i = _WHITESPACE.match(text, i + 1).end()
        index += 1
    return None


def locate(text: str, path: Sequence[Any]) -> Tuple[int, int]:
    """1-based line and column of the deepest value along ``path`` in a JSON document."""
    pos = _WHITESPACE.match(text, 0).end()
    for step in path:
        found = _child(text, pos, step)
        if found is None:
            break
        pos = found
    line = text.count("\n", 0, pos) + 1
    return line, pos - text.rfind("\n", 0, pos)


def _violation_path(raw: Any, violation) -> List[Any]:
    path: List[Any] = []
    for q, level in enumerate(raw["simplices"]):
        for idx, entry in enumerate(level):
            if entry.get("id") == violation.simplex:
                path = ["simplices", q, idx]
    match = re.fullmatch(r"d(\d+)", violation.identity)
    if path and match:
        path += ["faces", int(match.group(1))]
    return path


def _violation_error(code: int, text: str, raw: Any, violation) -> SpaceFormatError:
    path = _violation_path(raw, violation)
    line, column = locate(text, path) if path else (None, None)
    return SpaceFormatError(code, _describe(violation), line, column, rule=violation.identity)


def _ingest(data: bytes) -> Tuple[str, Any, SimplicialSet]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SpaceFormatError(SpaceFormatError.MALFORMED, f"not UTF-8: {e.reason}", rule="utf-8") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpaceFormatError(SpaceFormatError.MALFORMED, e.msg, e.lineno, e.colno, rule="json") from None
    try:
        parsed = SpaceFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        line, column = locate(text, first["loc"])
        raise SpaceFormatError(
            SpaceFormatError.SCHEMA, _schema_message(e), line, column, rule=first["type"]
        ) from None
    levels = [
        [
            NondegenerateSimplex(
                entry.id,
                q,
                tuple(SimplexRef(tuple(f.degeneracies), f.base) for f in entry.faces),
            )
            for entry in level
        ]
        for q, level in enumerate(parsed.simplices)
    ]
    return text, raw, SimplicialSet(parsed.name, levels)


def load_space(data: bytes, structural: bool = True) -> SimplicialSet:
    """Decode and schema-check a space file without checking simplicial identities.

    With ``structural`` false, unknown faces, duplicate ids and bad degeneracy
    words are left for :func:`simplicial.validate` to report.
    """
    text, raw, X = _ingest(data)
    if structural:
        found = structural_violations(X)
        if found:
            raise _violation_error(SpaceFormatError.SCHEMA, text, raw, found[0])
    return X


def parse_space(data: bytes) -> SimplicialSet:
    text, raw, X = _ingest(data)
    found, code = structural_violations(X), SpaceFormatError.SCHEMA
    if not found:
        found, code = list(validate(X).violations), SpaceFormatError.IDENTITY
    if found:
        raise _violation_error(code, text, raw, found[0])
    return X


def parse_presentation(data: bytes) -> Presentation:
    try:
        raw = json.loads(data.decode("utf-8"))
        parsed = PresentationFile.model_validate(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise PresentationFormatError(f"malformed presentation: {e}") from None
    except ValidationError as e:
        raise PresentationFormatError(_schema_message(e)) from None
    return Presentation.parse(parsed.generators, parsed.relators)


def inputs_digest(verb: str, options: Dict[str, Any], blobs: List[bytes]) -> str:
    h = hashlib.sha256()
    h.update(f"{verb}\n{canonical_json(options)}\n".encode())
    for blob in blobs:
        h.update(f"{hashlib.sha256(blob).hexdigest()}\n".encode())
    return h.hexdigest()


# handlers: (validated options, input bytes) -> (result payload, exit code)


def _validate(options, blobs):
    report = validate(load_space(blobs[0], structural=False))
    return report.to_dict(), 0 if report.ok else 2


def _homology(options, blobs):
    return reduced_homology(parse_space(blobs[0]), options.degree).to_dict(), 0


def _hall_basis(options, blobs):
    check_hall_rank(options.generators, options.nil_class, "main.hall_basis", cap_class=False)
    return [str(t) for t in hall_basis(options.generators, options.nil_class)], 0


def _witt(options, blobs):
    return witt_rank(options.generators, options.nil_class), 0


def _collect(options, blobs):
    word = FreeWord.parse(options.word)
    return collect(word, options.generators, options.nil_class).to_dict(), 0


def _cross_effect(options, blobs):
    n = options.nil_class
    d0, d1 = cross_effect_complex(n, options.ranks)
    return {
        "kernel": cross_effect_kernel(n, options.ranks).to_dict(),
        "ranks": [d0.ncols, d0.nrows, d1.nrows],
        "composite_zero": (d1 @ d0).is_zero(),
    }, 0


def _nilq(options, blobs):
    return nilpotent_quotient(parse_presentation(blobs[0]), options.nil_class).to_dict(), 0


def _loop_group(options, blobs):
    G = loop_group(parse_space(blobs[0]))
    q = options.degree
    gens = G.generators(q)
    faces = []
    if q >= 1:
        names = [str(r) for r in G.generators(q - 1)]
        faces = [[w.format(names) for w in G.face_words(q, i)] for i in range(q + 1)]
    return {"degree": q, "generators": [str(r) for r in gens], "faces": faces}, 0


def _tower_pi0(options, blobs):
    G = loop_group(parse_space(blobs[0]))
    return pi0(tower_stage(G, options.nil_class)).to_dict(), 0


def _layer_homotopy(options, blobs):
    G = loop_group(parse_space(blobs[0]))
    return layer_homotopy(G, options.nil_class, options.degree).to_dict(), 0


def _space(options, blobs):
    return standard_space(options.name, *options.params).to_dict(), 0


HANDLERS: Dict[str, Callable[[BaseModel, List[bytes]], Tuple[Any, int]]] = {
    "validate": _validate,
    "homology": _homology,
    "hall-basis": _hall_basis,
    "witt": _witt,
    "collect": _collect,
    "cross-effect": _cross_effect,
    "nilq": _nilq,
    "loop-group": _loop_group,
    "tower-pi0": _tower_pi0,
    "layer-homotopy": _layer_homotopy,
    "space": _space,
}


def _error_payload(e: Exception) -> dict:
    payload = {"type": type(e).__name__, "message": str(e)}
    if isinstance(e, SpaceFormatError):
        payload.update(e.to_dict())
    return payload


def run(cmd: Command) -> Tuple[Report, int]:
    """Execute one command. Never raises; failures become error reports."""
    started = time.perf_counter()
    blobs: List[bytes] = []
    try:
        expected = VERB_INPUTS.get(cmd.verb, 0)
        if len(cmd.inputs) != expected:
            raise InvalidArgument(f"{cmd.verb} takes {expected} input file(s), got {len(cmd.inputs)}")
        for name in cmd.inputs:
            try:
                blobs.append(Path(name).read_bytes())
            except OSError as e:
                raise InvalidArgument(f"cannot read {name}: {e.strerror}") from None
        try:
            options = VERB_OPTIONS[cmd.verb].model_validate(cmd.options)
        except ValidationError as e:
            raise InvalidArgument(_schema_message(e)) from None
        result, code = HANDLERS[cmd.verb](options, blobs)
        error = None
    except KanTowerError as e:
        result, code, error = None, e.exit_code, _error_payload(e)
    except Exception as e:
        log_event("error", "unexpected failure", {"verb": cmd.verb, "error": repr(e)}, source="main.run")
        wrapped = InternalInvariantError(f"unexpected {type(e).__name__}: {e}")
        result, code, error = None, wrapped.exit_code, _error_payload(wrapped)
    report = Report(
        verb=cmd.verb,
        inputs_digest=inputs_digest(cmd.verb, cmd.options, blobs),
        exit_code=code,
        result=result,
        error=error,
    )
    log_event(
        "info",
        "command finished",
        {"verb": cmd.verb, "exit_code": code, "elapsed_ms": round((time.perf_counter() - started) * 1000)},
        source="main.run",
    )
    return report, code


def render(report: Report) -> str:
    return canonical_json(report.model_dump(by_alias=True))


def _emit(verb: str, options: Dict[str, Any], inputs: Tuple[str, ...] = ()):
    report, code = run(Command(verb=verb, options=options, inputs=list(inputs)))
    click.echo(render(report))
    click.get_current_context().exit(code)


@click.group()
@click.option("--log-level", default=None, help="Overrides KANTOWER_LOG_LEVEL.")
def cli(log_level):
    """Kan loop groups, lower central series and free Lie algebras."""
    configure_logging(log_level)


@cli.command("validate")
@click.argument("space", type=click.Path(dir_okay=False))
def validate_cmd(space):
    """Check reducedness and the simplicial identities of a space file."""
    _emit("validate", {}, (space,))


@cli.command("homology")
@click.argument("space", type=click.Path(dir_okay=False))
@click.option("--degree", type=int, required=True)
def homology_cmd(space, degree):
    """Reduced integral homology of a space file."""
    _emit("homology", {"degree": degree}, (space,))


@cli.command("hall-basis")
@click.option("--generators", type=int, required=True)
@click.option("--class", "nil_class", type=int, required=True)
def hall_basis_cmd(generators, nil_class):
    _emit("hall-basis", {"generators": generators, "class": nil_class})


@cli.command("witt")
@click.option("--generators", type=int, required=True)
@click.option("--class", "nil_class", type=int, required=True)
def witt_cmd(generators, nil_class):
    _emit("witt", {"generators": generators, "class": nil_class})


@cli.command("collect")
@click.option("--generators", type=int, required=True)
@click.option("--class", "nil_class", type=int, required=True)
@click.option("--word", required=True, help='Whitespace separated letters, e.g. "b a b^-1".')
def collect_cmd(generators, nil_class, word):
    _emit("collect", {"generators": generators, "class": nil_class, "word": word})


def _ranks(ctx, param, value):
    try:
        return [int(r) for r in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected comma separated integers") from None


@cli.command("cross-effect")
@click.option("--class", "nil_class", type=int, required=True)
@click.option("--ranks", required=True, callback=_ranks, help="Comma separated, e.g. 1,1,1.")
def cross_effect_cmd(nil_class, ranks):
    _emit("cross-effect", {"class": nil_class, "ranks": ranks})


@cli.command("nilq")
@click.argument("presentation", type=click.Path(dir_okay=False))
@click.option("--class", "nil_class", type=int, required=True)
def nilq_cmd(presentation, nil_class):
    """Lower central quotients of a finitely presented group."""
    _emit("nilq", {"class": nil_class}, (presentation,))


@cli.command("loop-group")
@click.argument("space", type=click.Path(dir_okay=False))
@click.option("--degree", type=int, required=True)
def loop_group_cmd(space, degree):
    """Generators and face words of GX in one degree."""
    _emit("loop-group", {"degree": degree}, (space,))


@cli.group("tower")
def tower():
    """The lower central series tower of GX."""


@tower.command("pi0")
@click.argument("space", type=click.Path(dir_okay=False))
@click.option("--class", "nil_class", type=int, required=True)
def tower_pi0_cmd(space, nil_class):
    _emit("tower-pi0", {"class": nil_class}, (space,))


@cli.command("layer-homotopy")
@click.argument("space", type=click.Path(dir_okay=False))
@click.option("--class", "nil_class", type=int, required=True)
@click.option("--degree", type=int, required=True)
def layer_homotopy_cmd(space, nil_class, degree):
    _emit("layer-homotopy", {"class": nil_class, "degree": degree}, (space,))


@cli.command("space")
@click.argument("name")
@click.option("--param", "params", type=int, multiple=True)
def space_cmd(name, params):
    """Print a standard space in the space file format."""
    _emit("space", {"name": name, "params": list(params)})


@cli.command("fixtures")
@click.option("--directory", type=click.Path(file_okay=False), default=str(FIXTURE_DIR))
def fixtures_cmd(directory):
    """Re-run every recorded case and diff the reports."""
    summary = fixture_check(run, render, Path(directory))
    click.echo(canonical_json(summary.to_dict()))
    click.get_current_context().exit(summary.exit_code)


if __name__ == "__main__":
    cli()
