"""Command line interface: `heckezeta <command> ...`.

Every output starts with a header echoing the package versions and the full run
configuration (no timestamps), so identical configurations give identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field

import click
import mpmath
import numpy as np
import scipy

from . import __version__
from .errors import HeckeError

DIM_ENV = "HECKEZETA_DIM"
PRECISION_ENV = "HECKEZETA_PRECISION"
ZETA_NAMES = ("Z", "Zplus", "Zminus", "ZVplus", "ZVminus", "Zcplus", "Zcminus")
PARITY_CHOICES = ("full", "plus", "minus", "+", "-")


@dataclass
class RunConfig:
    command: str
    q: int | None = None
    precision_bits: int = 53
    dim: int | None = None
    truncation: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"
    threads: int = 1
    seed: int = 0
    params: dict = field(default_factory=dict)

    def header(self) -> dict:
        return {
            "program": "heckezeta",
            "version": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "mpmath": mpmath.__version__,
            "config": asdict(self),
        }


def parse_complex(text: str) -> complex:
    """'0.5+9.53i', '2', '-3i', '1.5-0.5j' -> complex."""
    t = str(text).strip().replace(" ", "").replace("I", "j").replace("i", "j")
    if not t:
        raise ValueError("empty complex literal")
    return complex(t)


class ComplexParam(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return parse_complex(value)
        except ValueError:
            self.fail(f"{value!r} is not a complex number of the form a+bi", param, ctx)


COMPLEX = ComplexParam()


def _parity(p: str) -> str:
    return {"plus": "+", "minus": "-"}.get(p, p)


def _default_dim() -> int | None:
    raw = os.environ.get(DIM_ENV)
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"{DIM_ENV} must be an integer, got {raw!r}")
    if n < 4 or n % 2:
        raise click.UsageError(f"{DIM_ENV} must be an even integer >= 4, got {n}")
    return n


def _precision(bits: int | None) -> int:
    if bits is None:
        bits = int(os.environ.get(PRECISION_ENV, "53"))
    if bits != 53:
        raise HeckeError(f"only binary64 (53-bit) arithmetic is implemented, got {bits} bits")
    return bits


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    return x


def _emit(cfg: RunConfig, result, rows: list[dict] | None = None):
    """Write JSON (structured) or CSV (flat rows) to cfg.output or stdout."""
    if cfg.fmt == "csv" and rows is not None:
        buf = io.StringIO()
        buf.write("# " + json.dumps(_jsonable(cfg.header()), sort_keys=True) + "\n")
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        text = buf.getvalue()
    else:
        text = json.dumps({"header": _jsonable(cfg.header()), "result": _jsonable(result)}, indent=2, sort_keys=True) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config file {path}: {exc}")
    if not isinstance(data, dict):
        raise click.UsageError("config file must hold a JSON object")
    return data


def _merge(ctx, name: str, value):
    """Explicit flags win; otherwise take the config-file value; otherwise the default."""
    src = ctx.get_parameter_source(name)
    if src is not None and src.name in ("COMMANDLINE", "ENVIRONMENT"):
        return value
    return ctx.find_root().obj.get("file", {}).get(name, value)


_REQUIRED = {"zeta": ("s",), "det": ("s",), "scan": ("t_max",)}


def _config(ctx, command: str, **params) -> RunConfig:
    root = ctx.find_root().obj
    merged = {k: _merge(ctx, k, v) for k, v in params.items()}
    for name in _REQUIRED.get(command, ()):
        if merged.get(name) is None:
            raise click.UsageError(f"missing option --{name.replace('_', '-')} (flag or config file)", ctx)
    if merged.get("s") is not None:
        try:
            merged["s"] = parse_complex(merged["s"])
        except ValueError:
            raise click.BadParameter(f"{merged['s']!r} is not a complex number of the form a+bi", ctx, param_hint="--s")
    q = merged.pop("q", None)
    dim = merged.pop("dim", None)
    if dim is None and "dim" in params:
        dim = _default_dim()
    return RunConfig(
        command=command,
        q=q,
        precision_bits=root["precision"],
        dim=dim,
        output=root["output"],
        fmt=root["fmt"],
        threads=root["threads"],
        seed=root["seed"],
        params={k: (str(v) if isinstance(v, complex) else v) for k, v in merged.items()},
    )


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON file with default option values.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write results here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--precision", type=int, default=None, help=f"Working precision in bits (env {PRECISION_ENV}).")
@click.option("--threads", type=click.IntRange(1), default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.version_option(__version__, prog_name="heckezeta")
@click.pass_context
def cli(ctx, config_path, output, fmt, precision, threads, seed):
    """Transfer operators and zeta functions for Hecke triangle groups."""
    ctx.obj = {
        "file": _load_config(config_path),
        "output": output,
        "fmt": fmt,
        "precision": _precision(precision),
        "threads": threads,
        "seed": seed,
    }


def _q_option(required=True):
    return click.option("--q", type=click.IntRange(3), required=required, help="Hecke index q >= 3.")


@cli.command()
@_q_option()
@click.pass_context
def info(ctx, q):
    """Group data: lambda, its minimal polynomial, m and the parity of q."""
    from .hecke_core import make_group, minimal_polynomial

    cfg = _config(ctx, "info", q=q)
    G = make_group(cfg.q)
    psi = minimal_polynomial(cfg.q)
    terms = []
    for i in reversed(range(len(psi))):
        c = psi[i]
        if c == 0:
            continue
        mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        coef = str(abs(c)) if (abs(c) != 1 or i == 0) else ""
        terms.append(("-" if c < 0 else "+") + coef + mon)
    poly = "".join(terms).lstrip("+")
    result = {
        "q": cfg.q,
        "lambda": G.lam_float,
        "minimal_polynomial": poly,
        "minimal_polynomial_coeffs": list(psi),
        "m": G.m,
        "parity": G.q_parity,
        "generators": {f"g{k}": G.g[k].as_array().tolist() for k in G.g},
    }
    _emit(cfg, result)


@cli.command()
@_q_option()
@click.option("--alphabet", type=click.Choice(["G", "GQ"]), default="G", show_default=True)
@click.option("--length", "length", type=click.IntRange(1), default=2, show_default=True)
@click.option("--max-exp", type=click.IntRange(1), default=1, show_default=True)
@click.option("--limit", type=click.IntRange(1), default=1000, show_default=True, help="Cap on the number of words listed.")
@click.pass_context
def words(ctx, q, alphabet, length, max_exp, limit):
    """Words of a given length from the B-set enumeration, with their tags."""
    from .symbolic_words import enumerate_regular_words

    cfg = _config(ctx, "words", q=q, alphabet=alphabet, length=length, max_exp=max_exp, limit=limit)
    p = cfg.params
    rows = []
    for w, tags in enumerate_regular_words(cfg.q, p["alphabet"], p["length"], max_exp=p["max_exp"]):
        rows.append({"word": w.label(), "det": w.det, "trace": float(w.trace), "tags": " ".join(str(t) for t in sorted(tags))})
        if len(rows) >= p["limit"]:
            break
    _emit(cfg, {"count": len(rows), "words": rows}, rows)


@cli.command()
@_q_option()
@click.option("--group", "group_tag", type=click.Choice(["Gamma", "Gamma_tilde"]), default="Gamma", show_default=True)
@click.option("--X", "X", type=click.FloatRange(min=1, min_open=True), default=100.0, show_default=True, help="Norm cutoff.")
@click.option("--primitive-only", is_flag=True)
@click.pass_context
def classes(ctx, q, group_tag, X, primitive_only):
    """Hyperbolic conjugacy classes with norm at most X."""
    from .symbolic_words import enumerate_conj_classes

    cfg = _config(ctx, "classes", q=q, group_tag=group_tag, X=X, primitive_only=primitive_only)
    p = cfg.params
    recs = enumerate_conj_classes(cfg.q, p["group_tag"], p["X"], primitive_only=p["primitive_only"])
    rows = [
        {"word": r.canonical_word.label(), "N": r.N, "det": r.det, "n": r.n, "length": r.ell, "k": r.kcount, "boundary": r.boundary}
        for r in recs
    ]
    _emit(cfg, {"count": len(rows), "classes": rows}, rows)


@cli.command()
@_q_option()
@click.option("--which", type=click.Choice(ZETA_NAMES), default="Z", show_default=True)
@click.option("--s", "s", type=COMPLEX, default=None, help="Spectral parameter, e.g. 2 or 1.5+0.5i.")
@click.option("--X", "X", type=float, default=None, help="Norm cutoff (default depends on q).")
@click.pass_context
def zeta(ctx, q, which, s, X):
    """Truncated Euler products: Z, Z_+-, Venkov's Z^V_+- and the correction Z^c_+-."""
    from .zeta_products import ZV_pm, Z_pm, Zc_pm, default_cutoff, selberg_Z

    cfg = _config(ctx, "zeta", q=q, which=which, s=s, X=X)
    p = cfg.params
    s = parse_complex(p["s"])
    Xv = p["X"] or default_cutoff(cfg.q)
    cfg.truncation = {"X": Xv}
    name = p["which"]
    if name == "Z":
        v = selberg_Z(cfg.q, s, Xv)
    elif name.startswith("ZV"):
        v = ZV_pm(cfg.q, s, "+" if name.endswith("plus") else "-", Xv)
    elif name.startswith("Zc"):
        v = Zc_pm(cfg.q, s, "+" if name.endswith("plus") else "-")
    else:
        v = Z_pm(cfg.q, s, "+" if name.endswith("plus") else "-", Xv)
    _emit(cfg, {"which": name, "s": s, "value": v.value, "abs": abs(v.value), "tail_estimate": v.tail_estimate})


@cli.command()
@_q_option()
@click.option("--parity", type=click.Choice(PARITY_CHOICES), default="full", show_default=True)
@click.option("--s", "s", type=COMPLEX, default=None)
@click.option("--dim", type=click.IntRange(4), default=None, help=f"Nodes per chart (env {DIM_ENV}).")
@click.pass_context
def det(ctx, q, parity, s, dim):
    """det(1 - L_s) for the full, even or odd transfer operator."""
    from .spectral_scan import default_dim
    from .transfer_operators import build_fast_operator, fredholm_det

    cfg = _config(ctx, "det", q=q, parity=parity, s=s, dim=dim)
    cfg.dim = cfg.dim or default_dim(cfg.q)
    if cfg.dim % 2:
        raise click.UsageError("--dim must be even")
    s = parse_complex(cfg.params["s"])
    d = fredholm_det(build_fast_operator(cfg.q, s, _parity(cfg.params["parity"]), N=cfg.dim))
    _emit(cfg, {"s": s, "det": d, "abs": abs(d)})


@cli.command()
@_q_option()
@click.option("--parity", type=click.Choice(["plus", "minus", "+", "-"]), default="minus", show_default=True)
@click.option("--t-min", type=float, default=0.5, show_default=True)
@click.option("--t-max", type=float, default=None, help="Upper end of the scan (required).")
@click.option("--step", type=click.FloatRange(min=0, min_open=True), default=0.05, show_default=True)
@click.option("--sigma", type=float, default=0.5, show_default=True)
@click.option("--dim", type=click.IntRange(4), default=None)
@click.option("--mode", type=click.Choice(["zeros", "line"]), default="zeros", show_default=True,
              help="zeros: certified and refined zeros; line: raw det samples.")
@click.pass_context
def scan(ctx, q, parity, t_min, t_max, step, sigma, dim, mode):
    """Zeros of det(1 - L+-) on Re s = sigma (and on the real segment (1/2, 1])."""
    from .spectral_scan import default_dim, report_spectrum, scan_line

    cfg = _config(ctx, "scan", q=q, parity=parity, t_min=t_min, t_max=t_max, step=step, sigma=sigma, dim=dim, mode=mode)
    cfg.dim = cfg.dim or default_dim(cfg.q)
    p = cfg.params
    par = _parity(p["parity"])
    if p["mode"] == "line":
        samples = scan_line(cfg.q, par, p["sigma"], p["t_min"], p["t_max"], p["step"], cfg.dim)
        rows = [{"t": r["t"], "re": r["det"].real, "im": r["det"].imag, "abs": r["abs"], "arg": r["arg"]} for r in samples]
        _emit(cfg, {"samples": rows}, rows)
        return
    zeros = report_spectrum(cfg.q, par, p["t_max"], cfg.dim, t_min=p["t_min"], step=p["step"], sigma=p["sigma"])
    rows = [z.to_json() for z in zeros]
    _emit(cfg, {"zeros": rows}, rows)


@cli.command()
@click.option("--suite", type=click.Choice(["algebra", "words", "traces", "zeta", "operators", "spectral", "all"]),
              default="all", show_default=True)
@_q_option(required=False)
@click.pass_context
def verify(ctx, suite, q):
    """Run acceptance checks; exit status 0 iff none fails."""
    from .verification import run_suite

    cfg = _config(ctx, "verify", q=q, suite=suite)
    qs = (cfg.q,) if cfg.q else None
    results = run_suite(cfg.params["suite"], qs, echo=lambda line: click.echo(line, err=True))
    rows = [{"id": r.cid, "status": r.status, "measured": r.measured, "tolerance": r.tolerance, "title": r.title} for r in results]
    table = "\n".join(f"{r['status']:4s}  {r['id']:>7s}  {r['title']}" for r in rows)
    click.echo(table, err=True)
    _emit(cfg, {"checks": [r.to_json() for r in results]}, rows)
    if any(r.passed is False for r in results):
        ctx.exit(1)


@cli.command()
@_q_option()
@click.option("--system", type=click.Choice(["F", "G", "FQ_odd", "GQ_odd", "FQ_even", "GQ_even"]), default="F", show_default=True)
@click.option("--parity", type=click.Choice(["plus", "minus", "+", "-"]), default="plus", show_default=True)
@click.option("--n-max", type=click.IntRange(1), default=3, show_default=True, help="Exponents listed for parabolic families.")
@click.pass_context
def maps(ctx, q, system, parity, n_max):
    """Branch tables with exact endpoints (coefficient vectors) and float embeddings."""
    from .interval_maps import branch_table

    cfg = _config(ctx, "maps", q=q, system=system, parity=parity, n_max=n_max)
    p = cfg.params
    table = branch_table(cfg.q, p["system"], _parity(p["parity"]))
    _emit(cfg, table.to_json(p["n_max"]))


def run_command(argv) -> int:
    """Run the CLI on an argument list and return the exit code (2 usage, 1 computation, 0 success)."""
    try:
        rv = cli.main(args=list(argv), prog_name="heckezeta", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1
    except HeckeError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        return 1
    return rv if isinstance(rv, int) else 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
