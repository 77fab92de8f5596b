# -*- coding: utf-8 -*-
# hypcount.py: CLI 진입점
from pathlib import Path
import sys

# 프로젝트 루트를 sys.path 에 추가 (어느 폴더에서 실행해도 패키지 import 가능)
ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from expcli.app import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
