from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from errors import ConfigError
from active_learning import (
    RunDirectory,
    learning_curve,
    loglog_slope,
    make_test_set,
    median_by_budget,
    run_active,
    run_baseline,
    total_budget,
    write_curve_csv,
)
from geometry import preset
from lensctl.handlers.common import EXIT_OK, fail, oracle_for, out_dir, seeds_for
from lensctl.runconfig import RunConfig

logger = logging.getLogger("lensctl")


def _run_dir(root: Path, cfg: RunConfig) -> RunDirectory:
    rd = RunDirectory(root, layer_count=cfg.unit_cell.layer_count, record_timings=cfg.record_timings)
    rd.start(cfg.echo())
    return rd


def _report_median(command: str, finals: List[float]) -> None:
    if len(finals) > 1:
        print(f"[{command}] median final fe over {len(finals)} seeds = {float(np.median(finals)):.4g}")


def al_run(cfg: RunConfig, out: Optional[Path], *, seed_list: Optional[Sequence[int]] = None, jobs: int = 1) -> int:
    """Active-learning run per seed; with several seeds each gets its own seed_<n>/ directory."""
    try:
        root = out_dir(cfg, out, "al")
        seeds = seeds_for(cfg, seed_list)
        finals = []
        for seed in seeds:
            c = cfg.with_seed(seed)
            target = root / f"seed_{seed}" if len(seeds) > 1 else root
            print(f"[al-run] seed={seed} budget={total_budget(c.al)} -> {target}")
            result = run_active(
                c.al,
                oracle_for(c),
                c.ensemble_config(),
                jobs=jobs,
                record_timings=c.record_timings,
                run_dir=_run_dir(target, c),
            )
            final = result.history.final
            finals.append(final.fe_complex)
            print(f"[success] seed={seed} n_train={final.n_train} fe={final.fe_complex:.4g}")
        _report_median("al-run", finals)
        return EXIT_OK
    except Exception as e:
        return fail("al-run", e)


def baseline_run(
    cfg: RunConfig,
    out: Optional[Path],
    *,
    seed_list: Optional[Sequence[int]] = None,
    budgets: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> int:
    """Random-sampling runs; default budget matches the AL schedule's total. Budgets of a seed share its test set."""
    try:
        root = out_dir(cfg, out, "baseline")
        seeds = seeds_for(cfg, seed_list)
        budgets = sorted(budgets) if budgets else [total_budget(cfg.al)]
        finals = []
        for seed in seeds:
            c = cfg.with_seed(seed)
            oracle = oracle_for(c)
            test_set = make_test_set(c.al, oracle, jobs=jobs)
            for n in budgets:
                target = root / f"seed_{seed}" if len(seeds) > 1 else root
                if len(budgets) > 1:
                    target = target / f"n_{n}"
                print(f"[baseline-run] seed={seed} n={n} -> {target}")
                result = run_baseline(
                    n,
                    c.al,
                    oracle,
                    c.ensemble_config(),
                    jobs=jobs,
                    record_timings=c.record_timings,
                    run_dir=_run_dir(target, c),
                    test_set=test_set,
                )
                final = result.history.final
                if n == budgets[-1]:
                    finals.append(final.fe_complex)
                print(f"[success] seed={seed} n_train={final.n_train} fe={final.fe_complex:.4g}")
        _report_median("baseline-run", finals)
        return EXIT_OK
    except Exception as e:
        return fail("baseline-run", e)


def cell_compare(
    cfg: RunConfig,
    out: Optional[Path],
    *,
    variants: Sequence[str],
    budgets: Sequence[int],
    seed_list: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> int:
    """Random-sampling learning curves for several unit-cell presets on the configured oracle."""
    try:
        if not budgets:
            raise ConfigError("cell-compare needs at least one budget")
        root = out_dir(cfg, out, "cell_compare")
        seeds = seeds_for(cfg, seed_list)
        points = []
        for name in variants:
            spec = preset(name)
            print(f"[cell-compare] {spec.variant_name}: budgets={list(budgets)} seeds={seeds}")
            points += learning_curve(
                spec,
                lambda s: oracle_for(cfg, s),
                budgets,
                seeds,
                cfg.al,
                cfg.ensemble_config(),
                jobs=jobs,
            )
        write_curve_csv(root / "cell_compare.csv", points)

        medians = median_by_budget(points)
        summary = {"seeds": seeds, "budgets": sorted(budgets), "variants": {}}
        for name in variants:
            variant = preset(name).variant_name
            rows = sorted((n, fe) for (v, _, n), fe in medians.items() if v == variant)
            entry = {"median_fe": {str(n): fe for n, fe in rows}}
            if len({n for n, _ in rows}) > 1:
                entry["loglog_slope"] = loglog_slope([n for n, _ in rows], [fe for _, fe in rows])
            summary["variants"][variant] = entry
            print(f"[cell-compare] {variant}: " + ", ".join(f"n={n} fe={fe:.4g}" for n, fe in rows))
        (root / "cell_compare.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        print(f"[success] Wrote {root / 'cell_compare.csv'}")
        return EXIT_OK
    except Exception as e:
        return fail("cell-compare", e)


__all__ = ["al_run", "baseline_run", "cell_compare"]
