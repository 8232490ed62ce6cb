# # Reports from the command line
#
# The genorder command writes deterministic JSON reports. Exit codes: 0 ok,
# 1 check failed, 2 usage or parse error, 3 domain error, 4 inconclusive.

# %%
import json
import subprocess
import sys

# %%
def genorder(*argv):
    proc = subprocess.run([sys.executable, "-m", "genorder", *argv], capture_output=True, text=True)
    return proc.returncode, proc.stdout

# %%
code, out = genorder("classify", "--expr", "(log(x))^2", "--norm-expr", "1/log(x)",
                     "--anchor", "2.8", "--class", "auto")
rep = json.loads(out)
print(code, rep["class"], rep["rho"], rep["member"])

# %%
code, out = genorder("verify", "sn", "--b-expr", "x")
print(code, json.loads(out)["failed"])

# %%
code, out = genorder("fixtures")
print(out)
