#!/usr/bin/env python3
"""Reference external analyzer speaking the line-JSON protocol.

Modes for exercising failure paths:
  --malformed      reply with a non-JSON line to analyze requests
  --sleep SECONDS  wait before every analyze reply
  --die-after N    exit silently after N analyze replies
"""

import argparse
import json
import sys
import time


def reports_for(code: str):
    out = []
    for i, line in enumerate(code.split("\n"), start=1):
        if "eval(" in line:
            out.append({
                "rule": "STUB-EVAL",
                "category": "SecurityLocal",
                "message": "stub: eval call",
                "line": i,
                "provenance_lines": [i],
            })
        if "query(" in line:
            out.append({
                "rule": "STUB-QUERY",
                "category": "SecurityFlow",
                "message": "stub: query sink",
                "line": i,
            })
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--malformed", action="store_true")
    parser.add_argument("--sleep", type=float, default=0.0)
    parser.add_argument("--die-after", type=int, default=0)
    parser.add_argument("--bad-category", action="store_true")
    args = parser.parse_args()

    answered = 0
    for raw in sys.stdin:
        raw = raw.strip()
        if not raw:
            continue
        request = json.loads(raw)
        if request.get("op") == "ping":
            print(json.dumps({"v": 1, "pong": True}), flush=True)
            continue
        if request.get("op") != "analyze":
            print("unknown op", flush=True)
            continue
        if args.sleep:
            time.sleep(args.sleep)
        if args.malformed:
            print("this is not json", flush=True)
            continue
        reports = reports_for(request.get("code", ""))
        if args.bad_category:
            for r in reports:
                r["category"] = "Bogus"
        print(json.dumps({"v": 1, "reports": reports}), flush=True)
        answered += 1
        if args.die_after and answered >= args.die_after:
            return


if __name__ == "__main__":
    main()
