# scripts/dump_group_config.py
# 내장 그룹을 JSON 그룹 형식으로 저장 (사용자 정의 그룹의 출발점)
from pathlib import Path
import sys

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from fuchsian.groups import BUILTINS, group_to_json, load_group  # noqa: E402

DST_DIR = Path("groups")


def dump_one(name: str, out_dir: Path = DST_DIR) -> Path:
    G = load_group(name)
    out_path = group_to_json(G, out_dir / f"{name}.json")
    # 저장본이 다시 검증을 통과하는지 확인
    load_group(str(out_path))
    print("saved:", out_path)
    return out_path


def main(argv=None):
    names = list(argv if argv is not None else sys.argv[1:]) or list(BUILTINS)
    for name in names:
        if name in BUILTINS:
            dump_one(name)
        else:
            print("skip (unknown builtin):", name)


if __name__ == "__main__":
    main()
