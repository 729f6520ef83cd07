# Answers requests in pairs, in reverse order. The proposed statement number
# is the statement count of the current program.
import json
import sys

held = []
for line in sys.stdin:
    req = json.loads(line)
    current = req["src"].split(" Y ")[0]
    rule = "stm%d Commute N" % current.count(";")
    held.append({"id": req["id"], "proposals": [{"rule": rule, "score": 0.0}]})
    if len(held) == 2:
        for resp in reversed(held):
            sys.stdout.write(json.dumps(resp) + "\n")
        sys.stdout.flush()
        held = []
