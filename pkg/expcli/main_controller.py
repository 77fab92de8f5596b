# -*- coding: utf-8 -*-
# expcli/main_controller.py
from __future__ import annotations

import json
import time
import traceback
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from utils_common import (
    ConfigError,
    DomainError,
    EnumerationError,
    FitError,
    GroupValidationError,
    log,
    make_rng,
)
from hyp2core.points import HPoint, ORIGIN
from fuchsian.groups import GroupSpec, load_group
from fuchsian.conjugacy import ConjClass, conj_data, select_class_element
from adjust.adjustment import get_candidate, parse_pair, parse_point_pair
from counting.series import CountSeries, count_adjusted, count_adjusted_pp, count_conj, count_orbit
from counting.fitting import fit_growth
from measures.skinning import predict_ratio, predict_ratio_pp, sigma_gamma_quad, sigma_x_mc, sigma_x_quad
from .config import ExperimentConfig
from .property_suites import run_suites
from .report import Report, StepLog

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_CONFIG = 2
EXIT_INCOMPLETE = 3
EXIT_INTERNAL = 4

# 켤레류가 필요한 실험
NEEDS_CLASS = ("count-conj", "count-adjusted", "sigma-quad")


def exit_code_for(e: BaseException) -> int:
    if isinstance(e, (ConfigError, GroupValidationError, DomainError)):
        return EXIT_CONFIG
    if isinstance(e, (FitError, EnumerationError)):
        return EXIT_INCOMPLETE
    # 분류되지 않은 예외는 내부 오류
    return EXIT_INTERNAL


class ExperimentController:
    def __init__(self, config: ExperimentConfig):
        self.cfg = config
        self.report = Report(config=config.to_dict())
        self.G: Optional[GroupSpec] = None
        self.conj: Optional[ConjClass] = None
        self.x = HPoint(*config.x)
        self.y = HPoint(*config.y)
        self._kw = {"workers": config.n_workers()}

    # ---- 실행 파이프라인 ------------------------------------------------------
    def run(self, *, write: bool = True) -> Report:
        cfg = self.cfg
        pipeline: List[Tuple[str, Callable[[], Optional[int]]]] = []
        if cfg.kind != "check":
            pipeline.append(("E1 Load group", self._load_group))
        if self._needs_class():
            pipeline.append(("E2 Select class", self._select_class))
        pipeline.append((f"E3 {cfg.kind}", self._runner()))

        for name, fn in pipeline:
            t0 = time.perf_counter()
            try:
                count = fn()
                self.report.steps.append(StepLog(name=name, ok=True, count=count))
            except Exception as e:
                self.report.steps.append(StepLog(name=name, ok=False, error=f"{e}\n{traceback.format_exc()}"))
                self.report.exit_code = exit_code_for(e)
                log("ERROR", f"{name}: {e}")
                break  # 실패 시 파이프라인 중단
            finally:
                self.report.timing[name] = round(time.perf_counter() - t0, 6)

        if write:
            self._write()
        log("INFO", f"{cfg.kind}: exit {self.report.exit_code}")
        return self.report

    def _needs_class(self) -> bool:
        cfg = self.cfg
        return cfg.kind in NEEDS_CLASS or (cfg.kind == "ratio-test" and cfg.ratio_of == "adjusted") or (
            cfg.kind == "fit-growth" and not cfg.series and cfg.fit_of in ("conj", "adjusted")
        )

    def _runner(self) -> Callable[[], Optional[int]]:
        return {
            "count-orbit": self._count_orbit,
            "count-conj": self._count_conj,
            "count-adjusted": self._count_adjusted,
            "count-adjusted-pp": self._count_adjusted_pp,
            "fit-growth": self._fit_growth,
            "ratio-test": self._ratio_test,
            "sigma-quad": self._sigma_quad,
            "check": self._check,
        }[self.cfg.kind]

    # ---- 공통 단계 ------------------------------------------------------------
    def _load_group(self) -> int:
        self.G = load_group(self.cfg.group)
        self.report.results["group"] = {"name": self.G.name, "letters": self.G.n_letters}
        return self.G.n_letters

    def _select_class(self) -> None:
        g = select_class_element(self.G, self.cfg.class_selector)
        self.conj = conj_data(self.G, g, origin=ORIGIN)
        self.report.results["class"] = self.conj.describe(self.G)

    def _write(self) -> None:
        stem = self.cfg.kind if self.cfg.kind != "check" else f"check-{self.cfg.suite}"
        t0 = time.perf_counter()
        try:
            self.report.write(self.cfg.out_dir(), stem)
        except OSError as e:
            log("ERROR", f"출력 저장 실패: {e}")
            if self.report.exit_code == EXIT_OK:
                self.report.exit_code = EXIT_CONFIG
        self.report.timing["write"] = round(time.perf_counter() - t0, 6)

    # ---- 계수 실험 ------------------------------------------------------------
    def _series(self, kind: str, pair_sel: Optional[str] = None) -> CountSeries:
        cfg, G, c, x, y = self.cfg, self.G, self.conj, self.x, self.y
        grid = cfg.grid()
        if kind == "orbit":
            return count_orbit(G, x, y, grid, cfg.word_cap, **self._kw)
        if kind == "conj":
            return count_conj(G, c, x, y, grid, cfg.word_cap, cross_check=cfg.cross_check, **self._kw)
        if kind == "adjusted":
            if cfg.candidate and pair_sel is None:
                return count_adjusted(G, c, None, x, grid, cfg.word_cap, candidate=get_candidate(cfg.candidate), y=y, **self._kw)
            pair = parse_pair(pair_sel or cfg.pair, c, x, y)
            return count_adjusted(G, c, pair, x, grid, cfg.word_cap, y=y, **self._kw)
        if kind == "adjusted-pp":
            return count_adjusted_pp(G, parse_point_pair(pair_sel or cfg.pair), x, y, grid, cfg.word_cap, **self._kw)
        raise ConfigError(f"알 수 없는 series kind: {kind}")

    def _count(self, kind: str) -> int:
        s = self._series(kind)
        self.report.add_series(kind, s)
        log("INFO", f"{kind}: N({s.T_grid[-1]:g}) = {int(s.N[-1])}")
        return int(s.N[-1])

    def _count_orbit(self) -> int:
        return self._count("orbit")

    def _count_conj(self) -> int:
        n = self._count("conj")
        if self.cfg.cross_check and not self.report.series["conj"].params.get("direct_equal", True):
            self.report.exit_code = EXIT_PROPERTY
        return n

    def _count_adjusted(self) -> int:
        return self._count("adjusted")

    def _count_adjusted_pp(self) -> int:
        return self._count("adjusted-pp")

    # ---- 적합 / 비율 ----------------------------------------------------------
    def _load_series(self, path: str) -> CountSeries:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"series 파일이 없습니다: {p}")
        if p.suffix.lower() == ".json":
            rec = json.loads(p.read_text(encoding="utf-8"))
            return CountSeries.from_dict(rec.get("series", rec))
        return CountSeries.from_frame(pd.read_csv(p), kind=self.cfg.fit_of, params={"source": str(p)})

    def _fit_growth(self) -> int:
        cfg = self.cfg
        if cfg.series:
            s = self._load_series(cfg.series)
        else:
            s = self._series(cfg.fit_of)
        self.report.add_series(s.kind, s)
        window = tuple(cfg.fit_window) if cfg.fit_window else None
        fit = fit_growth(s, cfg.expected(s.kind), window=window)
        self.report.results["fit"] = fit.to_dict()
        used = np.ones(len(s), dtype=bool)
        if window is not None:
            used = (s.T_grid >= window[0] - 1e-12) & (s.T_grid <= window[1] + 1e-12)
        if not s.complete[used].all():
            log("WARN", "적합 구간에 불완전한 열거가 있습니다", scope="FIT")
            self.report.exit_code = EXIT_INCOMPLETE
        elif fit.flagged:
            self.report.exit_code = EXIT_PROPERTY
        return fit.n_points

    def _ratio_test(self) -> int:
        cfg = self.cfg
        kind = cfg.ratio_of
        sA, sB = self._series(kind, cfg.pair), self._series(kind, cfg.pair_b)
        self.report.add_series(f"{kind}-A", sA)
        self.report.add_series(f"{kind}-B", sB)
        kw = dict(seriesA=sA, seriesB=sB, n_nodes=cfg.n_nodes, scale=cfg.scale)
        if kind == "adjusted":
            c, x, y = self.conj, self.x, self.y
            pred = predict_ratio(c, parse_pair(cfg.pair, c, x, y), parse_pair(cfg.pair_b, c, x, y), x, **kw)
        else:
            pred = predict_ratio_pp(parse_point_pair(cfg.pair), parse_point_pair(cfg.pair_b), self.x, self.y, **kw)
        self.report.results["ratio"] = pred.to_dict()
        log("INFO", f"ratio predicted={pred.predicted_ratio:.6g} empirical={pred.empirical_ratio:.6g} "
                    f"rel_dev={pred.rel_dev:.4f}", scope="RATIO")
        if not (sA.all_complete and sB.all_complete):
            self.report.exit_code = EXIT_INCOMPLETE
        elif not pred.rel_dev <= cfg.ratio_tol:
            self.report.exit_code = EXIT_PROPERTY
        return len(pred.T_used)

    # ---- σ 구적 ---------------------------------------------------------------
    def _sigma_quad(self) -> int:
        cfg, c, x, y = self.cfg, self.conj, self.x, self.y
        pair = parse_pair(cfg.pair, c, x, y)
        rng = make_rng(cfg.seed)
        if cfg.target == "x":
            est = sigma_x_quad(x, pair.F2, ORIGIN, cfg.n_nodes, scale=cfg.scale)
            mc = sigma_x_mc(x, pair.F2, ORIGIN, max(cfg.samples, 2), rng)
            self.report.results["sigma_mc"] = mc.to_dict()
        else:
            est = sigma_gamma_quad(c, pair.F1, ORIGIN, cfg.n_nodes, scale=cfg.scale)
        self.report.results["sigma"] = {"target": cfg.target, "pair": pair.label, **est.to_dict()}
        log("INFO", f"σ_{cfg.target} = {est.value:.10g} ± {est.quadrature_error:.2e}", scope="SIGMA")
        return est.n_nodes

    # ---- 성질 검사 ------------------------------------------------------------
    def _check(self) -> int:
        cfg = self.cfg
        results = run_suites(cfg.suite, make_rng(cfg.seed), cfg.samples)
        self.report.suites = [r.to_dict() for r in results]
        if not all(r.passed for r in results):
            self.report.exit_code = EXIT_PROPERTY
        return sum(r.passed for r in results)


def run(config: ExperimentConfig, *, write: bool = True) -> Report:
    return ExperimentController(config).run(write=write)


def check_properties(suite: str, seed: int = 0, sample_count: int = 200, *, write: bool = False) -> Report:
    cfg = ExperimentConfig.from_dict({"kind": "check", "suite": suite, "seed": seed, "samples": sample_count})
    return ExperimentController(cfg).run(write=write)
