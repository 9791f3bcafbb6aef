"""
Script to run every problem descriptor in data/problems and write its report
Descriptors are .json or .toml files; grid commands produce .csv reports
"""

import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from pydantic import ValidationError

from app.config import settings
from app.exceptions import AdelicError
from app.services.runner import emit, parse_descriptor, run


def run_problems(problems_dir: Path = settings.problems_dir, reports_dir: Path = settings.reports_dir) -> bool:
    """Run all descriptors in `problems_dir`; returns True when none failed"""

    reports_dir.mkdir(parents=True, exist_ok=True)

    processed_count = 0
    failed_count = 0

    descriptors = sorted(p for p in problems_dir.iterdir() if p.suffix in (".json", ".toml"))
    if not descriptors:
        print(f"⚠️  No descriptors found in: {problems_dir}")
        return True

    for path in descriptors:
        print(f"\n📄 Processing: {path.name}")
        fmt = path.suffix[1:]

        try:
            descriptor = parse_descriptor(path.read_text(encoding="utf-8"), fmt)
            report = run(descriptor)
            payload = emit(report)

            suffix = ".csv" if report.table is not None else ".json"
            out_file = reports_dir / f"{path.stem}{suffix}"
            out_file.write_bytes(payload)

            for warning in report.warnings:
                print(f"   ⚠️  {warning}")
            print(f"   ✅ {descriptor.command}")
            print(f"   💾 Saved: {out_file.name}")
            processed_count += 1

        except AdelicError as e:
            print(f"   ❌ Error (exit {e.exit_code}): {e}")
            failed_count += 1
        except ValidationError as e:
            print(f"   ❌ Infeasible input: {e.errors()[0]['msg']}")
            failed_count += 1

    print(f"\n{'='*60}")
    print(f"📊 Processing Complete!")
    print(f"✅ Successfully processed: {processed_count} problems")
    print(f"❌ Failed: {failed_count} problems")
    print(f"{'='*60}")
    return failed_count == 0


if __name__ == "__main__":
    print(f"{settings.app_name} problem runner")
    print("="*60)
    sys.exit(0 if run_problems() else 1)
