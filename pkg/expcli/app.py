# -*- coding: utf-8 -*-
"""
expcli/app.py: hypcount CLI

  python hypcount.py count-orbit --group bolza --t-max 10
  python hypcount.py check busemann --samples 1000 --seed 7
  python hypcount.py ratio-test --pair cosine:0.5,0.5 --pair-b zero --config exp.json

표준출력: 리포트 JSON (sort_keys). 종료 코드: 0 성공, 1 성질 실패, 2 설정 오류, 3 불완전 열거, 4 내부 오류.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from utils_common import ConfigError, load_env, log
from .config import ExperimentConfig, FIT_OF, RATIO_OF, TARGETS
from .main_controller import EXIT_CONFIG, check_properties, run
from .property_suites import suite_names

__all__ = ["main", "run", "check_properties", "build_parser"]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="ExperimentConfig JSON 경로 (CLI 플래그가 우선)")
    p.add_argument("--group", default=None, help="내장 그룹 이름(bolza, cyclic-demo, free2-demo) 또는 그룹 JSON 경로")
    p.add_argument("--x", type=float, nargs=2, default=None, metavar=("RE", "IM"), help="기준점 x (상반평면 좌표)")
    p.add_argument("--y", type=float, nargs=2, default=None, metavar=("RE", "IM"), help="기준점 y (상반평면 좌표)")
    p.add_argument("--class", dest="class_selector", default=None,
                   help="켤레류 선택: shortest | class:k | gen:k | word:i,j,.. | pow:k:<selector>")
    p.add_argument("--pair", default=None, help="조정 쌍: zero | const:c1,c2 | neg-half | cosine:a1,a2")
    p.add_argument("--candidate", default=None, help="외부 높이 후보 (예: conj-half)")
    p.add_argument("--t-min", dest="t_min", type=float, default=None, help="T 격자 시작")
    p.add_argument("--t-max", dest="t_max", type=float, default=None, help="T 격자 끝")
    p.add_argument("--t-step", dest="t_step", type=float, default=None, help="T 격자 간격")
    p.add_argument("--t-grid", dest="t_grid", type=float, nargs="+", default=None, help="T 격자 직접 지정")
    p.add_argument("--word-cap", dest="word_cap", type=int, default=None, help="단어 길이 상한 (가지치기 없는 그룹)")
    p.add_argument("--n-nodes", dest="n_nodes", type=int, default=None, help="구적 노드 수")
    p.add_argument("--seed", type=int, default=None, help="난수 시드")
    p.add_argument("--samples", type=int, default=None, help="표본 수 (check / Monte-Carlo)")
    p.add_argument("--scale", type=float, default=None, help="μ_o 배율 λ (정규화 독립성 확인)")
    p.add_argument("--output", default=None, help="결과 저장 폴더 (기본: HYPCOUNT_OUTPUT_DIR)")
    p.add_argument("--workers", type=int, default=None, help="스레드 수 (기본: HYPCOUNT_WORKERS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypcount", description="hypcount - Fuchsian 궤도 계수 실험 도구")
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("count-orbit", help="Γ-궤도 점 개수 N(T)")
    _common(p)

    p = sub.add_parser("count-conj", help="켤레류 궤도 점 개수 (⟨γ̂⟩-잉여류)")
    _common(p)
    p.add_argument("--cross-check", dest="cross_check", action="store_true", default=None,
                   help="켤레 행렬 직접 계수와 비교")

    p = sub.add_parser("count-adjusted", help="조정 높이 h(g) ≤ T 인 잉여류 개수")
    _common(p)

    p = sub.add_parser("count-adjusted-pp", help="점-대-점 조정 높이 개수")
    _common(p)

    p = sub.add_parser("fit-growth", help="log N(T) 기울기 적합")
    _common(p)
    p.add_argument("--series", default=None, help="입력 시리즈 (CSV: T,N[,complete] 또는 JSON)")
    p.add_argument("--of", dest="fit_of", choices=FIT_OF, default=None, help="시리즈가 없을 때 계산할 실험")
    p.add_argument("--expected-slope", dest="expected_slope", type=float, default=None, help="기대 기울기")
    p.add_argument("--window", dest="fit_window", type=float, nargs=2, default=None, metavar=("LO", "HI"),
                   help="적합 구간 [LO, HI]")

    p = sub.add_parser("ratio-test", help="두 조정 쌍의 계수 비율 vs σ 예측")
    _common(p)
    p.add_argument("--pair-b", dest="pair_b", default=None, help="분모 조정 쌍 (기본 zero)")
    p.add_argument("--of", dest="ratio_of", choices=RATIO_OF, default=None, help="adjusted | adjusted-pp")
    p.add_argument("--tol", dest="ratio_tol", type=float, default=None, help="허용 상대 편차 (기본 0.15)")

    p = sub.add_parser("sigma-quad", help="σ_x(F₂) 또는 σ_γ(F₁) 구적")
    _common(p)
    p.add_argument("--target", choices=TARGETS, default=None, help="x | gamma")

    p = sub.add_parser("check", help="성질 검사 suite 실행")
    p.add_argument("suite", choices=suite_names(), help="suite 이름")
    p.add_argument("--config", default=None, help="ExperimentConfig JSON 경로")
    p.add_argument("--seed", type=int, default=None, help="난수 시드")
    p.add_argument("--samples", type=int, default=None, help="표본 수")
    p.add_argument("--output", default=None, help="결과 저장 폴더")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_env()
    args = build_parser().parse_args(argv)
    cli = {k: v for k, v in vars(args).items() if k != "config"}
    try:
        cfg = ExperimentConfig.resolve(cli, args.config)
    except ConfigError as e:
        log("ERROR", f"설정 오류: {e}")
        return EXIT_CONFIG
    report = run(cfg)
    print(report.to_json())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
