# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Isotonic and smoothed hazard estimates
#
# Draw a sample from a hazard that dips below linear growth, fit the
# penalized isotonic hazard on ``[0, a]`` and smooth it with the triweight
# kernel.

# %%
import numpy as np

from isohazard import DFamily, RngStream, empirical_cumhaz, penalized_isotonic_hazard, smooth_hazard

# %%
model = DFamily(-1.0)
x = model.sample(200, RngStream(7))
a = float(model.quantile(0.95))
print(f"n = {x.size}, a = {a:.4f}")

# %% [markdown]
# ## Empirical cumulative hazard against the truth

# %%
H_n = empirical_cumhaz(x)
grid = np.linspace(0, a, 9)
for t, emp, true in zip(grid, H_n(grid), model.cumhaz(grid)):
    print(f"{t:6.3f}  {emp:8.4f}  {true:8.4f}")

# %% [markdown]
# ## Penalized isotonic fit

# %%
fit = penalized_isotonic_hazard(x, a)
print("penalty", fit.penalty)
print("levels", np.round(fit.levels, 3))

# %%
sm = smooth_hazard(fit)
for t in np.linspace(0.1, a, 6):
    print(f"h({t:.2f}): true {model.hazard(t):.3f}  isotonic {fit(t):.3f}  smoothed {sm.hazard(t):.3f}")
