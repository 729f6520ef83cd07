import json
import sys

for line in sys.stdin:
    req = json.loads(line)
    proposals = [
        {"rule": "stm1 Commute N", "score": -0.1},
        {"rule": "stm1 NotARule N", "score": -0.2},
        {"rule": "stm2 Commute Nl", "score": -0.3},
    ]
    sys.stdout.write(json.dumps({"id": req["id"], "proposals": proposals}) + "\n")
    sys.stdout.flush()
