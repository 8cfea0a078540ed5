"""Upper and lower envelopes for log S(x), and the assembled regime bound."""

# %%
import io
import math

from sidonlab.bounds import certificate, envelope_sweep, regime_coefficient, write_sweep_csv

# the regime split is balanced at gamma = sqrt 2
for g in (0.5, 1 / math.sqrt(2), 1.0, math.sqrt(2), 2.0, 2 * math.sqrt(2)):
    print(f"gamma={g:.4f}  coefficient={regime_coefficient(g):.6f}")

# %%
rows = envelope_sweep(1e3, 1e12, 6)
buf = io.StringIO()
write_sweep_csv(rows, buf)
print(buf.getvalue())

# %% at desk scale the certificate is only heuristic; at astronomical x it is not
for log_x in (math.log(1e8), 1e4, 1e8):
    c = certificate(log_x=log_x)
    print(f"log x={log_x:.4g}  y={c.y:.3g}  total log bound={c.total_log:.6g}  heuristic={c.heuristic}")
    for note in c.notes:
        print("   note:", note)

# %% optional plot (needs matplotlib)
try:
    from sidonlab.bounds import plot_sweep

    plot_sweep(envelope_sweep(1e3, 1e12, 60), "envelopes.png")
    print("wrote envelopes.png")
except ImportError:
    print("matplotlib not installed; skipping the plot")
