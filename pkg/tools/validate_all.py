"""Run every property suite and print a pass/fail summary"""
import sys
from pathlib import Path
import logging

sys.path.insert(0, str(Path(__file__).parent.parent))

from app.config import settings
from app.physics.eos import ThermoParams
from app.verification.samplers import GENERATOR_NAME
from app.verification.suites import SuiteContext, run_all

logging.basicConfig(level=logging.WARNING)


def validate_all(seed: int = settings.DEFAULT_SEED):
    """Run the suites and collect passed/failed lines"""
    print("=" * 60)
    print(f"🧪 PROPERTY SUITES (seed {seed}, {GENERATOR_NAME})")
    print("=" * 60)
    
    passed = []
    failed = []
    
    for result in run_all(SuiteContext(ThermoParams.from_settings(), seed)):
        line = f"{result.name} ({result.elapsed:.1f}s)"
        if result.passed:
            print(f"✅ {line}")
            passed.append(line)
        else:
            print(f"❌ {line} {result.message}")
            failed.append(f"{line} {result.message}".strip())
        for key, value in result.metrics.items():
            print(f"    {key}: {value:.6g}")
    
    return passed, failed


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else settings.DEFAULT_SEED
    passed, failed = validate_all(seed)
    
    print("\n" + "=" * 60)
    print("📋 VALIDATION SUMMARY")
    print("=" * 60)
    print(f"\n✅ PASSED: {len(passed)}")
    for item in passed:
        print(f"  • {item}")
    
    if failed:
        print(f"\n❌ FAILED: {len(failed)}")
        for item in failed:
            print(f"  • {item}")
        print("\n❌ RESULT: FAIL")
        sys.exit(1)
    else:
        print("\n✅ RESULT: PASS")
        sys.exit(0)


if __name__ == "__main__":
    main()
