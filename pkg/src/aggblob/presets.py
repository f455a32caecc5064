"""Preset catalog: named, fully parameterized simulation configurations.

Presets marked long=True have horizons or step caps that take well over desk
scale to integrate; they are excluded from the default test suite but run
fine through the CLI.  Descriptions state what each run demonstrates.

Naming and parameter conventions:
  - epsilon_exp presets set the regularization through eps = h**q, so the
    same nominal value tracks the particle spacing across N.
  - attractive Gaussian kernels are the unit-mass bump scaled by -1: with
    descent dynamics a negative well attracts, and the integral -1 puts the
    quadratic-diffusion existence threshold at nu = 0.5.
  - "table1" presets sweep initial mass for repulsion exponents p in
    {0, 1, 2} with per-case horizons and step caps; "meta" presets localize
    the attraction (delta) or vary the diffusion coefficient (nu).
"""

from __future__ import annotations

from dataclasses import dataclass

from .experiments import ExperimentConfig

_EK_INITIAL = {
    "type": "sum",
    "parts": [
        {"type": "char", "a": -0.7, "b": -0.5, "height": 1.0},
        {"type": "char", "a": 0.3, "b": 0.5, "height": 1.5},
    ],
}


def _gaussian_attractive(delta: float) -> dict:
    return {"type": "scaled", "factor": -1.0, "base": {"type": "gaussian", "delta": delta}}


@dataclass(frozen=True)
class Preset:
    config: ExperimentConfig
    description: str
    long: bool = False


def _catalog() -> dict[str, Preset]:
    presets: dict[str, Preset] = {}

    def add(name, description, long=False, **kwargs):
        presets[name] = Preset(
            config=ExperimentConfig(name=name, **kwargs),
            description=description,
            long=long,
        )

    add(
        "two_body",
        "two equal masses under quadratic attraction; separation contracts as e^-t",
        kernel={"type": "power_law", "k": 2},
        m=2.0,
        nu=0.0,
        epsilon_abs=0.05,
        initial={"type": "char", "a": -1.0, "b": 1.0, "height": 0.5},
        domain=(-1.0, 1.0),
        n_particles=2,
        t_max=1.0,
        max_step=0.01,
        rel_tol=1e-10,
        abs_tol=1e-13,
        snapshot_dt=0.1,
    )

    add(
        "zero_model",
        "no interaction, no diffusion; particles must not move",
        kernel={"type": "zero"},
        m=2.0,
        nu=0.0,
        epsilon_abs=0.1,
        initial={"type": "char", "a": -0.5, "b": 0.5, "height": 1.0},
        domain=(-1.0, 1.0),
        n_particles=50,
        t_max=0.1,
        max_step=0.01,
        snapshot_dt=0.05,
    )

    for n in (400, 800):
        add(
            f"pme_selfsim_n{n}",
            "pure quadratic diffusion from a compactly supported self-similar "
            "profile; the profile at time t is the evolved exact solution",
            kernel={"type": "zero"},
            m=2.0,
            nu=1.0,
            epsilon_exp=0.9,
            initial={"type": "barenblatt", "alpha": 2.0, "tau": 0.15, "mass": 1.0},
            domain=(-1.2, 1.2),
            n_particles=n,
            t_max=0.5,
            max_step=1e-3,
            snapshot_dt=0.05,
        )

    for mass in (0.6, 1.0, 1.4):
        add(
            f"height_mass_{mass}",
            "quartic repulsion with linear attraction at m=800; the diffusion "
            "acts as a height constraint and the mass selects the phase",
            kernel={"type": "rep_att", "A": 4.0, "B": 1.0},
            m=800.0,
            nu=1.0,
            mollify_kernel=True,
            epsilon_exp=0.9,
            initial={"type": "barenblatt", "alpha": 2.0, "tau": 0.15, "mass": mass},
            domain=(-1.1, 1.1),
            n_particles=500,
            t_max=6.0,
            max_step=1e-3,
            snapshot_dt=0.12,
        )

    add(
        "varym_mass1.0_m2",
        "quadratic-diffusion companion of the height sweep at unit mass",
        long=True,
        kernel={"type": "rep_att", "A": 4.0, "B": 1.0},
        m=2.0,
        nu=1.0,
        mollify_kernel=True,
        epsilon_exp=0.9,
        initial={"type": "barenblatt", "alpha": 2.0, "tau": 0.15, "mass": 1.0},
        domain=(-1.1, 1.1),
        n_particles=1000,
        t_max=6.0,
        max_step=1e-3,
        snapshot_dt=0.12,
    )

    add(
        "newtonian_merge_a",
        "height-constrained linear attraction: two equal bumps saturate the "
        "constraint first and then merge",
        long=True,
        kernel={"type": "power_law", "k": 1},
        m=800.0,
        nu=1.0,
        mollify_kernel=True,
        epsilon_exp=0.99,
        initial={
            "type": "sum",
            "parts": [
                {"type": "barenblatt", "alpha": 2.0, "tau": 0.01, "mass": 0.3, "center": -0.5},
                {"type": "barenblatt", "alpha": 2.0, "tau": 0.01, "mass": 0.3, "center": 0.5},
            ],
        },
        domain=(-1.1, 1.1),
        n_particles=400,
        t_max=2.0,
        max_step=1e-4,
        snapshot_dt=0.04,
    )

    add(
        "newtonian_merge_b",
        "height-constrained linear attraction: unequal bumps and a block "
        "begin merging before the constraint becomes active",
        long=True,
        kernel={"type": "power_law", "k": 1},
        m=800.0,
        nu=1.0,
        mollify_kernel=True,
        epsilon_exp=0.99,
        initial={
            "type": "sum",
            "parts": [
                {"type": "barenblatt", "alpha": 2.0, "tau": 0.01, "mass": 0.15, "center": 0.1},
                {"type": "barenblatt", "alpha": 2.0, "tau": 0.01, "mass": 0.15, "center": 0.5},
                {"type": "char", "a": 0.5, "b": 0.9, "height": 0.9},
            ],
        },
        domain=(-1.1, 1.1),
        n_particles=400,
        t_max=2.0,
        max_step=1e-4,
        snapshot_dt=0.04,
    )

    # mass sweep at fixed quartic attraction, short-range repulsion |x|^p/p;
    # per-case horizon and step cap, discretization hardness grows with p
    table1 = {
        0: (0.99, 300, [(1.5, 1.0, 1e-3), (1.7, 1.0, 1e-3), (1.9, 1.0, 1e-3),
                        (2.1, 0.25, 1e-4), (2.3, 0.25, 1e-4)]),
        1: (0.9, 500, [(0.6, 12.0, 1e-3), (0.8, 6.0, 10 ** -3.5), (1.0, 6.0, 10 ** -3.5),
                       (1.2, 3.0, 10 ** -3.5), (1.4, 3.0, 10 ** -3.5)]),
        2: (0.85, 600, [(0.7, 28.0, 1e-4), (0.9, 20.0, 1e-4), (1.1, 12.0, 1e-4),
                        (1.3, 12.0, 1e-4), (1.5, 2.5, 1e-5), (1.7, 0.75, 1e-5)]),
    }
    for p, (eps_exp, n, cases) in table1.items():
        for mass, t_max, k in cases:
            add(
                f"table1_p{p}_mass{mass}",
                f"phase of the constrained equilibrium vs mass, repulsion exponent {p}",
                long=True,
                kernel={"type": "rep_att", "A": 4.0, "B": float(p)},
                m=800.0,
                nu=1.0,
                mollify_kernel=p < 2,
                epsilon_exp=eps_exp,
                initial={"type": "char", "a": -1.05, "b": 1.05, "height": mass / 2.1},
                domain=(-1.1, 1.1),
                n_particles=n,
                t_max=t_max,
                max_step=k,
                snapshot_dt=t_max / 50,
            )

    meta_delta = {
        0.02: (1.0, 1e-4, 0.02, True),
        0.03: (1.0, 1e-4, 0.02, True),
        # horizon covers the collapse of the two-bump state (around t ~ 21);
        # step cap relaxed from 1e-4 so the run stays desk-scale
        0.04: (30.0, 2e-3, 0.05, False),
        0.05: (125.0, 2e-3, 2.5, True),
    }
    for delta, (t_max, k, dt, long) in meta_delta.items():
        add(
            f"meta_delta_{delta}",
            f"attractive Gaussian of range {delta:g} with quadratic diffusion; "
            "bump count and metastable lifetime depend on the range",
            long=long,
            kernel=_gaussian_attractive(delta),
            m=2.0,
            nu=0.25,
            epsilon_exp=0.9,
            initial={"type": "char", "a": -0.6, "b": 0.6, "height": 1.0},
            domain=(-1.1, 1.1),
            n_particles=600,
            t_max=t_max,
            max_step=k,
            snapshot_dt=dt,
        )

    meta_nu = {
        0.15: (3.0, 1e-4, 0.06, True),
        0.25: (125.0, 1e-4, 2.5, True),
        0.35: (1.5, 1e-4, 0.03, True),
        # horizon extended past the nominal settling time so the particle
        # speeds have room to decay to the steady-state threshold
        0.45: (10.0, 2e-3, 0.1, False),
    }
    for nu, (t_max, k, dt, long) in meta_nu.items():
        add(
            f"meta_nu_{nu}",
            f"attractive Gaussian of range 0.05, diffusion coefficient {nu:g}; "
            "stronger diffusion suppresses the multi-bump metastable states",
            long=long,
            kernel=_gaussian_attractive(0.05),
            m=2.0,
            nu=nu,
            epsilon_exp=0.9,
            initial={"type": "char", "a": -0.6, "b": 0.6, "height": 1.0},
            domain=(-1.1, 1.1),
            n_particles=500,
            t_max=t_max,
            max_step=k,
            snapshot_dt=dt,
        )

    add(
        "linear_diffusion_spreading",
        "attractive Gaussian of range 0.1 with linear diffusion; a single "
        "bump forms fast and then spreads slowly (no steady state exists)",
        kernel=_gaussian_attractive(0.1),
        m=1.0,
        nu=0.2,
        epsilon_exp=0.9,
        initial={"type": "char", "a": -0.6, "b": 0.6, "height": 1.0},
        domain=(-1.1, 1.1),
        n_particles=500,
        t_max=3.0,
        max_step=1e-3,
        snapshot_dt=0.05,
    )

    for delta in (0.1, 0.5, 1.0):
        add(
            f"meta_log_delta_{delta}",
            f"localized logarithmic attraction of range {delta:g}; the strong "
            "singularity prevents cluster formation",
            long=True,
            kernel={"type": "log_1d", "delta": delta},
            m=2.0,
            nu=0.4,
            mollify_kernel=True,
            epsilon_exp=0.9,
            initial={"type": "char", "a": -0.5, "b": 0.5, "height": 1.0},
            domain=(-0.55, 0.55),
            n_particles=500,
            t_max=0.5,
            max_step=1e-5,
            snapshot_dt=0.01,
        )

    for delta in (0.05, 0.1, 0.5):
        add(
            f"meta_newt_delta_{delta}",
            f"localized linear attraction of range {delta:g}; the profile stays "
            "unimodal for every range",
            long=True,
            kernel={"type": "newtonian_1d", "delta": delta},
            m=2.0,
            nu=0.1,
            mollify_kernel=True,
            epsilon_exp=0.9,
            initial={"type": "char", "a": -0.9, "b": 0.9, "height": 1.0},
            domain=(-1.1, 1.1),
            n_particles=600,
            t_max=0.5,
            max_step=1e-5,
            snapshot_dt=0.01,
        )

    add(
        "ek_metastability",
        "quartic-quadratic interaction with weak linear diffusion; two unequal "
        "bumps form fast, then mass equilibrates between them very slowly",
        long=True,
        kernel={"type": "rep_att", "A": 4.0, "B": 2.0},
        m=1.0,
        nu=0.075**2 / 2,
        epsilon_exp=0.99,
        initial=_EK_INITIAL,
        domain=(-1.1, 1.1),
        n_particles=600,
        t_max=20.0,
        max_step=1e-3,
        snapshot_dt=0.4,
    )

    add(
        "equil_x4x2_m2_lownu",
        "quartic-quadratic interaction, quadratic diffusion, tiny coefficient; "
        "the unequal two-bump state does not symmetrize",
        long=True,
        kernel={"type": "rep_att", "A": 4.0, "B": 2.0},
        m=2.0,
        nu=0.075**2 / 2,
        epsilon_exp=0.99,
        initial=_EK_INITIAL,
        domain=(-1.1, 1.1),
        n_particles=800,
        t_max=10.0,
        max_step=1e-3,
        snapshot_dt=0.2,
    )

    add(
        "equil_x4x2_m2_nu0.01",
        "quartic-quadratic interaction, quadratic diffusion at nu=0.01; the "
        "two bumps symmetrize quickly",
        long=True,
        kernel={"type": "rep_att", "A": 4.0, "B": 2.0},
        m=2.0,
        nu=0.01,
        epsilon_exp=0.99,
        initial=_EK_INITIAL,
        domain=(-1.1, 1.1),
        n_particles=800,
        t_max=10.0,
        max_step=1e-3,
        snapshot_dt=0.2,
    )

    add(
        "equil_x4x2_m800",
        "quartic-quadratic interaction under the height constraint; without "
        "diffusion to move mass the unequal bumps never equilibrate",
        long=True,
        kernel={"type": "rep_att", "A": 4.0, "B": 2.0},
        m=800.0,
        nu=1.0,
        epsilon_exp=0.85,
        initial=_EK_INITIAL,
        domain=(-0.9, 0.7),
        n_particles=600,
        t_max=3.0,
        max_step=1e-4,
        snapshot_dt=0.06,
    )

    return presets


_PRESETS = _catalog()


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def get_preset(name: str) -> Preset:
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; see list_presets()")
    return _PRESETS[name]


def preset_config(name: str, **overrides) -> ExperimentConfig:
    """A fresh config for the named preset, with optional field overrides."""
    config = get_preset(name).config
    if overrides:
        config = config.with_overrides(**overrides)
    return config


def list_presets() -> dict[str, dict]:
    """Catalog of all presets: description, long flag, and full config."""
    return {
        name: {
            "description": p.description,
            "long": p.long,
            "config": p.config.to_dict(),
        }
        for name, p in sorted(_PRESETS.items())
    }
