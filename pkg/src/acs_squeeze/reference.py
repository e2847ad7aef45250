"""Reference minima and minimizing parameters used as reproduction targets.

Each row: (two_j, metric, value, (theta1, theta2, phi, phi_r)).  Parameters are
stored exactly as given, including values outside [0, 2 pi) for the azimuths.
"""

from __future__ import annotations

SPIN_SQUEEZING_ROWS = [
    (1, "xi_sorensen(x)", 1.0, (1.4784, 1.47775, 6.20295, 0.634272)),
    (1, "xi_sorensen(y)", 1.0, (0.0514062, 0.0675389, 1.37728, 0.08810551)),
    (1, "xi_sorensen(z)", 1.0, (3.05204, 3.1233, 0.0913789, 6.24518)),
    (2, "xi_sorensen(x)", 0.5, (1.55444, 1.57172, 0.0163226, 3.12513)),
    (2, "xi_sorensen(y)", 0.5, (1.12713, 2.01633, 3.14159, 6.28319)),
    (2, "xi_sorensen(z)", 0.5, (1.48475, 1.48475, 3.14272, 3.14057)),
    (3, "xi_sorensen(x)", 0.428602, (1.56079, 1.57234, 0.0099, 3.12666)),
    (3, "xi_sorensen(y)", 0.5802, (1.748, 0.001, 6.20574, 0.01)),
    (3, "xi_sorensen(z)", 0.428612, (0.0145656, 0.0145655, 2.06606, 3.14173)),
    (4, "xi_sorensen(x)", 0.400095, (1.55125, 1.57999, 0.017252, 3.10659)),
    (4, "xi_sorensen(y)", 0.550874, (3.14159, 1.63663, 6.28144, 0.01)),
    (4, "xi_sorensen(z)", 0.400024, (0.01, 0.01, 2.11057, 3.15168)),
    (10, "xi_sorensen(x)", 0.357216, (1.55977, 1.57551, 0.00997, 3.09137)),
    (10, "xi_sorensen(y)", 0.489156, (3.14159, 2.16809, 6.28228, 0.01)),
    (10, "xi_sorensen(z)", 0.357208, (0.01, 0.01, 1.93091, 3.14183)),
    (20, "xi_sorensen(x)", 0.345018, (1.5583, 1.57549, 0.01158, 3.02478)),
    (20, "xi_sorensen(y)", 0.466658, (3.14159, 2.44198, 6.2827, 0.01)),
    (20, "xi_sorensen(z)", 0.344977, (0.01052, 0.01052, 1.86283, 3.14212)),
]

PLANAR_SQUEEZING_ROWS = [
    (1, "xi_planar(xy)", 0.5, (3.07749, 0.393397, 4.62433, 3.57279)),
    (1, "xi_planar(yz)", 0.5, (0.175436, 0.198689, 3.75173, -0.160262)),
    (1, "xi_planar(zx)", 0.5, (0.653902, 0.767073, 6.27056, 0.156313)),
    (2, "xi_planar(xy)", 0.44906, (2.09702, 1.04457, 6.28319, 1.2433)),
    (2, "xi_planar(yz)", 0.44906, (0.589433, 0.589433, 3.14159, -0.719954)),
    (2, "xi_planar(zx)", 0.449065, (0.671033, 0.671092, 6.27062, 3.13338)),
    (3, "xi_planar(xy)", 0.414836, (2.14272, 0.998877, 6.28318, 0.0001)),
    (3, "xi_planar(yz)", 0.414836, (0.571919, 0.571919, 3.14159, 5.669e-6)),
    (3, "xi_planar(zx)", 0.427156, (0.631818, 0.631852, 0.01, 3.14838)),
    (4, "xi_planar(xy)", 0.389929, (2.10559, 1.03601, 6.28318, 0.0001)),
    (4, "xi_planar(yz)", 0.389929, (0.534789, 0.534789, 3.14159, 4.319e-8)),
    (4, "xi_planar(zx)", 0.415149, (0.682875, 0.68289, 0.01, 3.12543)),
    (10, "xi_planar(xy)", 0.317381, (1.97969, 1.1619, 6.28318, 0.0001)),
    (10, "xi_planar(yz)", 0.317381, (0.408897, 0.408897, 3.14159, -6.8344e-8)),
    (10, "xi_planar(zx)", 0.391766, (0.628319, 0.628348, 0.01, 3.14856)),
    (20, "xi_planar(xy)", 0.277618, (1.8875, 1.2541, 6.28318, 0.0001)),
    (20, "xi_planar(yz)", 0.277618, (0.316701, 0.316701, 3.14159, 5.8783e-7)),
    (20, "xi_planar(zx)", 0.370164, (0.628443, 0.784857, 0.756098, 4.60592)),
]

TABLES = {"spin": SPIN_SQUEEZING_ROWS, "planar": PLANAR_SQUEEZING_ROWS}

# reference curve-fit coefficients, lowest power of 1/J first
FIT_X_Z = {"degrees": (0, 2), "coefficients": (0.35, 0.16)}
FIT_Y = {"degrees": (0, 1, 2, 3), "coefficients": (0.4, 0.61, 0.84, 0.34)}
FIT_PLANAR_XY_YZ = {"degrees": (0, 1, 2), "coefficients": (0.257, 0.089, 0.3)}
FIT_PLANAR_ZX = {"degrees": (0, 1, 2, 3), "coefficients": (0.37, 0.12, -0.06, 0.015)}
