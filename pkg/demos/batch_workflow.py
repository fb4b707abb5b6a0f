"""
The command-line workflow end to end
====================================

Synthesise a small corpus, write a manifest, measure everything with
``vibrato-lab batch``, then fit the results with ``vibrato-lab fit``. Each
step is the same call a shell user would make.
"""

import csv
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp(prefix="vibrato-demo-"))


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "vibrato_lab", *map(str, args)],
                          capture_output=True, text=True)
    if proc.stderr:
        print(proc.stderr.strip())
    return proc


# notes climbing the A string, with a bit of noise
notes = [247.0, 294.0, 349.0, 392.0, 440.0, 523.0, 587.0, 659.0, 784.0]
with open(work / "manifest.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["path", "string_freq_hz", "center_hint_hz", "player"])
    for i, f in enumerate(notes):
        name = f"note{i}.wav"
        cli("synth", "--out", work / name, "--f-center", f, "--depth-cents", 18 + 2 * i,
            "--rate", 5.6 + 0.1 * i, "--noise", 0.02, "--seed", i)
        w.writerow([name, 220.0, f, "p1" if i % 2 else "p2"])
    # a note with no vibrato, to see how rejections look
    cli("synth", "--out", work / "flat.wav", "--f-center", 440, "--depth-cents", 0)
    w.writerow(["flat.wav", 220.0, 440.0, "p1"])

cli("batch", work / "manifest.csv", work / "results.csv")
with open(work / "results.csv") as fh:
    for row in csv.DictReader(fh):
        if row["status"] == "ok":
            print(f"{row['file']:10s} x_c={float(row['x_c_frac']):.3f} "
                  f"d={float(row['d_cents']):5.2f} c  rate={float(row['rate_hz']):.2f} Hz")
        else:
            print(f"{row['file']:10s} {row['status']}: {row['reason']}")

fit = cli("fit", work / "results.csv", "--x", "x_c_frac", "--y", "d_cents", "--degree", "1",
          "--group", "player", "--format", "csv")
print(fit.stdout)

model = cli("model", "--out", work / "curves.csv")
print(model.stdout.strip())
print(f"files in {work}")
