"""
How many directions does a short data record span?
===================================================

A length-7 window of a single-input, single-output system of order 2 lives
in a 9-dimensional subspace of R^14 (7 input samples plus 2 initial
states). Stack all windows of a sufficiently exciting record into a
Hankel matrix and the singular spectrum shows that dimension directly.
"""

# %%
import numpy as np

from lgap import SARXSystem, generate_excited_trajectory, hankel, singular_values

system = SARXSystem.case_study()
rng = np.random.default_rng(1)

# %%
# Sixty samples per mode, inputs uniform on [-1, 1]. The plant carries
# truncated Gaussian equation noise with standard deviation 1e-4.
spectra = {}
for mode in (0, 1):
    w = generate_excited_trajectory(system, mode, 60, rng=rng)
    spectra[mode] = singular_values(hankel(w, 7))

print(" i   mode 0        mode 1")
for i in range(14):
    print(f"{i + 1:2d}   {spectra[0][i]:.3e}     {spectra[1][i]:.3e}")

# %%
# Nine values sit far above the noise; the rest are noise-sized.
for mode, s in spectra.items():
    print(f"mode {mode}: {np.sum(s > 1e-3)} values above 1e-3, s9/s10 = {s[8] / s[9]:.0f}")

# %%
# The gap between s9 and s10 is set by two things. Input power pushes
# the signal values up, and the noise divided by the norm of the
# kernel row sets the floor. The second mode has half the input gain and
# a shorter kernel row, so its ratio is several times smaller. Without
# noise the tail collapses to rounding level:
clean = SARXSystem.case_study(noise_sigma=0.0)
s = singular_values(hankel(generate_excited_trajectory(clean, 1, 60, rng=rng), 7))
print("noise-free mode 1 tail:", np.array2string(s[8:], precision=2))
