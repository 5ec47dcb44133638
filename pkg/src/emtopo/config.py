"""Run configuration: 'key = value' text files with strict validation.

Unknown keys, malformed values, and conflicting keys are rejected with
the offending line named. Optional numeric keys accept the word 'auto'.
render_config() echoes a resolved configuration that parses back to the
same RunConfig (a fixpoint), which is written next to every run's output.
"""
import math
from dataclasses import dataclass, field, fields, replace

from .curves import IsoPair
from .dynamics import HopfICParams, ModelParams, equilibrium_state
from .grid import NONPERIODIC, PERIODIC, BoundarySpec, FaceBC, make_grid


class ConfigError(ValueError):
    pass


def _parse_float(s):
    try:
        return float(s)
    except ValueError:
        raise ConfigError("expected a number, got %r" % s)


def _parse_int(s):
    try:
        return int(s)
    except ValueError:
        raise ConfigError("expected an integer, got %r" % s)


def _parse_auto_float(s):
    if s == "auto":
        return None
    return _parse_float(s)


def _parse_bc(s):
    if s not in ("dirichlet", "neumann", "periodic"):
        raise ConfigError("expected dirichlet, neumann or periodic, got %r" % s)
    return s


def _parse_ic(s):
    if s not in ("hopf", "equilibrium"):
        raise ConfigError("expected hopf or equilibrium, got %r" % s)
    return s


def _parse_times(s):
    if not s.strip():
        return ()
    try:
        return tuple(float(x) for x in s.split(","))
    except ValueError:
        raise ConfigError("expected comma-separated numbers, got %r" % s)


def _parse_pairs(s):
    if not s.strip():
        return ()
    out = []
    for item in s.split(","):
        bits = item.split(":")
        if len(bits) != 2:
            raise ConfigError("expected u:v pairs, got %r" % item)
        try:
            out.append((float(bits[0]), float(bits[1])))
        except ValueError:
            raise ConfigError("expected u:v pairs, got %r" % item)
    return tuple(out)


def _parse_str(s):
    return s


def _fmt_float(x):
    return "%.17g" % x


def _fmt_auto(x):
    return "auto" if x is None else _fmt_float(x)


def _fmt_times(ts):
    return ",".join(_fmt_float(t) for t in ts)


def _fmt_pairs(ps):
    return ",".join("%s:%s" % (_fmt_float(a), _fmt_float(b)) for a, b in ps)


@dataclass(frozen=True)
class RunConfig:
    L: float = 5.0
    n: int = 100
    bc_x: str = "dirichlet"
    bc_y: str = "dirichlet"
    bc_z: str = "dirichlet"
    bc_x_dirichlet_u: float = None
    bc_x_dirichlet_v: float = None
    bc_y_dirichlet_u: float = None
    bc_y_dirichlet_v: float = None
    bc_z_dirichlet_u: float = None
    bc_z_dirichlet_v: float = None
    eps: float = 0.3
    beta: float = 0.7
    gamma: float = 0.5
    Du: float = 1.0
    Dv: float = 0.0
    dt: float = None
    safety: float = 0.9
    t_end: float = 0.8
    snapshot_times: tuple = (0.2, 0.4, 0.6, 0.8)
    ic: str = "hopf"
    ic_lambda1: float = math.sqrt(2.0)
    ic_lambda2: float = math.sqrt(0.5)
    ic_offset: float = -0.4
    u_min: float = None
    u_max: float = None
    v_min: float = None
    v_max: float = None
    p_reg: float = None
    # (-0.7, -0.1) is the documented level pair; the offsets were picked
    # empirically so the default list also yields nonempty curve sets at
    # every snapshot (the documented pair is never jointly attained).
    iso_pairs: tuple = ((-0.7, -0.1), (-0.7, -0.35), (-0.5, -0.38))
    out_dir: str = "out"

    # --- derived builders ---

    def params(self):
        return ModelParams(self.eps, self.beta, self.gamma, self.Du, self.Dv)

    def grid(self):
        kinds = tuple(
            PERIODIC if k == "periodic" else NONPERIODIC
            for k in (self.bc_x, self.bc_y, self.bc_z)
        )
        return make_grid(self.L, self.n, kinds)

    def boundary(self):
        ustar, vstar = None, None
        faces = []
        for ax, kind in enumerate((self.bc_x, self.bc_y, self.bc_z)):
            if kind == "dirichlet":
                uval = getattr(self, "bc_%s_dirichlet_u" % "xyz"[ax])
                vval = getattr(self, "bc_%s_dirichlet_v" % "xyz"[ax])
                if uval is None or vval is None:
                    if ustar is None:
                        ustar, vstar = equilibrium_state(self.params())
                    uval = ustar if uval is None else uval
                    vval = vstar if vval is None else vval
                faces.extend([FaceBC("dirichlet", {"u": uval, "v": vval})] * 2)
            else:
                faces.extend([FaceBC(kind)] * 2)
        return BoundarySpec(tuple(faces))

    def hopf_params(self):
        return HopfICParams(self.ic_lambda1, self.ic_lambda2, self.ic_offset)

    def iso_pair_list(self):
        return [IsoPair(a, b) for a, b in self.iso_pairs]

    def explicit_ranges(self):
        """The four range values, or None when any is auto."""
        vals = (self.u_min, self.u_max, self.v_min, self.v_max)
        return None if any(v is None for v in vals) else vals


_SPECS = {
    "L": (_parse_float, _fmt_float),
    "n": (_parse_int, str),
    "bc_x": (_parse_bc, str),
    "bc_y": (_parse_bc, str),
    "bc_z": (_parse_bc, str),
    "bc_x_dirichlet_u": (_parse_auto_float, _fmt_auto),
    "bc_x_dirichlet_v": (_parse_auto_float, _fmt_auto),
    "bc_y_dirichlet_u": (_parse_auto_float, _fmt_auto),
    "bc_y_dirichlet_v": (_parse_auto_float, _fmt_auto),
    "bc_z_dirichlet_u": (_parse_auto_float, _fmt_auto),
    "bc_z_dirichlet_v": (_parse_auto_float, _fmt_auto),
    "eps": (_parse_float, _fmt_float),
    "beta": (_parse_float, _fmt_float),
    "gamma": (_parse_float, _fmt_float),
    "Du": (_parse_float, _fmt_float),
    "Dv": (_parse_float, _fmt_float),
    "dt": (_parse_auto_float, _fmt_auto),
    "safety": (_parse_float, _fmt_float),
    "t_end": (_parse_float, _fmt_float),
    "snapshot_times": (_parse_times, _fmt_times),
    "ic": (_parse_ic, str),
    "ic_lambda1": (_parse_float, _fmt_float),
    "ic_lambda2": (_parse_float, _fmt_float),
    "ic_offset": (_parse_float, _fmt_float),
    "u_min": (_parse_auto_float, _fmt_auto),
    "u_max": (_parse_auto_float, _fmt_auto),
    "v_min": (_parse_auto_float, _fmt_auto),
    "v_max": (_parse_auto_float, _fmt_auto),
    "p_reg": (_parse_auto_float, _fmt_auto),
    "iso_pairs": (_parse_pairs, _fmt_pairs),
    "out_dir": (_parse_str, str),
}

assert set(_SPECS) == {f.name for f in fields(RunConfig)}


def _validate(cfg):
    if cfg.n < 8:
        raise ConfigError("n must be at least 8")
    if cfg.L <= 0:
        raise ConfigError("L must be positive")
    if cfg.eps <= 0:
        raise ConfigError("eps must be positive")
    if cfg.Du < 0 or cfg.Dv < 0:
        raise ConfigError("diffusion coefficients must be non-negative")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigError("dt must be positive (or auto)")
    if not (0 < cfg.safety <= 1):
        raise ConfigError("safety must be in (0, 1]")
    if cfg.t_end < 0:
        raise ConfigError("t_end must be non-negative")
    ts = cfg.snapshot_times
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ConfigError("snapshot_times must be strictly ascending")
    if ts and (ts[0] < 0 or ts[-1] > cfg.t_end):
        raise ConfigError("snapshot_times must lie within [0, t_end]")
    if cfg.p_reg is not None and cfg.p_reg <= 0:
        raise ConfigError("p_reg must be positive (or auto)")
    for ax in "xyz":
        kind = getattr(cfg, "bc_%s" % ax)
        for f_ in ("u", "v"):
            key = "bc_%s_dirichlet_%s" % (ax, f_)
            if kind != "dirichlet" and getattr(cfg, key) is not None:
                raise ConfigError(
                    "conflicting keys: %s is set but bc_%s = %s" % (key, ax, kind)
                )
    for lo, hi in (("u_min", "u_max"), ("v_min", "v_max")):
        a, b = getattr(cfg, lo), getattr(cfg, hi)
        if (a is None) != (b is None):
            raise ConfigError("%s and %s must be set together" % (lo, hi))
        if a is not None and a >= b:
            raise ConfigError("%s must be below %s" % (lo, hi))
    if cfg.ic_lambda1 == 0 or cfg.ic_lambda2 == 0:
        raise ConfigError("ic_lambda1/ic_lambda2 must be nonzero")
    return cfg


def parse_config(text):
    """Parse config text into a RunConfig; raises ConfigError on any
    unknown key, malformed value, duplicate or conflicting setting."""
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected 'key = value', got %r" % (lineno, raw.strip()))
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _SPECS:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))
        if key in seen:
            raise ConfigError("line %d: duplicate key %r" % (lineno, key))
        try:
            seen[key] = _SPECS[key][0](val)
        except ConfigError as e:
            raise ConfigError("line %d: key %r: %s" % (lineno, key, e))
    return _validate(RunConfig(**seen))


def apply_overrides(cfg, overrides):
    """Apply 'key=value' strings on top of an existing RunConfig."""
    upd = {}
    for item in overrides:
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in _SPECS:
            raise ConfigError("bad override %r (expected key=value with a known key)" % item)
        try:
            upd[key] = _SPECS[key][0](val.strip())
        except ConfigError as e:
            raise ConfigError("override %r: %s" % (item, e))
    return _validate(replace(cfg, **upd))


def render_config(cfg):
    """Canonical echo of every key; parses back to an equal RunConfig."""
    lines = ["# resolved configuration"]
    for f_ in fields(RunConfig):
        fmt = _SPECS[f_.name][1]
        lines.append("%s = %s" % (f_.name, fmt(getattr(cfg, f_.name))))
    return "\n".join(lines) + "\n"
