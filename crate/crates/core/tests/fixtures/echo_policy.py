import json
import sys

for line in sys.stdin:
    req = json.loads(line)
    resp = {"id": req["id"], "proposals": [{"rule": "stm1 Commute N", "score": -0.5}]}
    sys.stdout.write(json.dumps(resp) + "\n")
    sys.stdout.flush()
