"""Runs asgm with --trace on every program and validates each trace."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def check(asgm, program, validator, extra):
    with tempfile.TemporaryDirectory() as tmp:
        trace = pathlib.Path(tmp) / "trace.jsonl"
        proc = subprocess.run([asgm, "run", str(program), "--trace", str(trace), "--max-steps", "500", *extra],
                              capture_output=True, text=True)
        if proc.returncode == 1:
            return None  # unparsable input writes no trace
        lines = trace.read_text().splitlines()
    records = [json.loads(line) for line in lines]
    for r in records:
        validator.validate(r)
    *steps, final = records
    assert "status" in final, f"{program}: last record is not the final record"
    assert all("step" in r for r in steps), f"{program}: final record before the end"
    assert [r["step"] for r in steps] == list(range(1, len(steps) + 1)), f"{program}: step numbers not consecutive"
    assert final["steps"] == len(steps), f"{program}: step count mismatch"
    rewrites = {}
    for r in steps:
        if r["kind"] != "move":
            rewrites[r["rule"]] = rewrites.get(r["rule"], 0) + 1
    assert rewrites == final["rewrites"], f"{program}: rewrite counts disagree with the events"
    return len(records)


def main():
    asgm, programs, schema_path = sys.argv[1:4]
    validator = jsonschema.Draft202012Validator(json.loads(pathlib.Path(schema_path).read_text()))
    total = 0
    for program in sorted(pathlib.Path(programs).glob("*.src")):
        for extra in ([], ["--refocus", "root"], ["--gc"]):
            n = check(asgm, program, validator, extra)
            if n is not None:
                total += n
    print(f"{total} trace records valid")


if __name__ == "__main__":
    main()
