"""
Moist-air relations between temperature, humidity ratio and relative humidity.

Saturation pressure over water uses the Magnus form
p_sat(T) = 611.2 * exp(17.62 * T / (243.12 + T)) Pa, T in degC.
All functions accept scalars or numpy arrays.
"""
import numpy as np

MAGNUS_A_PA = 611.2
MAGNUS_B = 17.62
MAGNUS_C_DEGC = 243.12
MOLAR_RATIO = 0.622


def saturation_pressure(temperature):
    """
    Saturation vapour pressure over water.

    Args:
        temperature: Air temperature in degC (valid in [-40, 60])

    Returns:
        Saturation pressure in Pa
    """
    t = np.asarray(temperature, dtype=float)
    return MAGNUS_A_PA * np.exp(MAGNUS_B * t / (MAGNUS_C_DEGC + t))


def vapor_pressure(humidity_ratio, pressure):
    """Partial vapour pressure (Pa) of air with the given humidity ratio (kg/kg)."""
    x = np.asarray(humidity_ratio, dtype=float)
    return x * pressure / (MOLAR_RATIO + x)


def relative_humidity_unclamped(temperature, humidity_ratio, pressure):
    return 100.0 * vapor_pressure(humidity_ratio, pressure) / saturation_pressure(temperature)


def rh_from_tx(temperature, humidity_ratio, pressure):
    """
    Relative humidity from temperature and humidity ratio.

    Args:
        temperature: degC
        humidity_ratio: kg water per kg dry air (>= 0)
        pressure: Total pressure in Pa (> 0)

    Returns:
        Relative humidity in %, clamped to [0, 100]; see is_saturated() for the flag
    """
    rh = np.clip(relative_humidity_unclamped(temperature, humidity_ratio, pressure), 0.0, 100.0)
    return float(rh) if np.ndim(rh) == 0 else rh


def is_saturated(temperature, humidity_ratio, pressure):
    """True where the unclamped relative humidity exceeds 100 %."""
    return relative_humidity_unclamped(temperature, humidity_ratio, pressure) > 100.0


def x_from_trh(temperature, relative_humidity, pressure):
    """Humidity ratio (kg/kg) of air at the given temperature (degC) and RH (%)."""
    pv = np.asarray(relative_humidity, dtype=float) / 100.0 * saturation_pressure(temperature)
    x = MOLAR_RATIO * pv / (pressure - pv)
    return float(x) if np.ndim(x) == 0 else x


def rh_sensitivities(temperature, humidity_ratio, pressure):
    """
    Partial derivatives of relative humidity.

    Returns:
        (dRH/dT in %/K, dRH/dX in % per kg/kg)
    """
    t = np.asarray(temperature, dtype=float)
    x = np.asarray(humidity_ratio, dtype=float)
    rh = relative_humidity_unclamped(t, x, pressure)
    dlnpsat_dt = MAGNUS_B * MAGNUS_C_DEGC / (MAGNUS_C_DEGC + t) ** 2
    d_rh_dt = -rh * dlnpsat_dt
    d_rh_dx = 100.0 * pressure * MOLAR_RATIO / (MOLAR_RATIO + x) ** 2 / saturation_pressure(t)
    return d_rh_dt, d_rh_dx
