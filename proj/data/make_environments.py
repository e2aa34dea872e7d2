#!/usr/bin/env python3
"""Regenerates environments.json: scattering parameters (cgs) for the
localization-rate table.

Photon environments use a thermal wavenumber k = 2.7 k_B T / (hbar c) and the
blackbody number density n = 410.7 cm^-3 (T / 2.7255 K)^3, flux = n c.
Sunlight uses the solar constant divided by a mean photon energy of 1.35 eV.
Photon cross sections are Rayleigh-like, (8 pi / 3) k^4 a^6, capped at the
geometric value pi a^2. Gas environments use N2 at 300 K with thermal
momentum hbar k = sqrt(3 m k_B T), v = 5e4 cm/s and the geometric cross
section.
"""
import json
import math
import pathlib

HBAR = 1.054571817e-27      # erg s
K_B = 1.380649e-16          # erg / K
C = 2.99792458e10           # cm / s
EV = 1.602176634e-12        # erg
AMU = 1.66053906660e-24     # g

SIZES = [1e-3, 1e-5, 1e-6]  # cm


def thermal_photons(temperature):
    k = 2.7 * K_B * temperature / (HBAR * C)
    n = 410.7 * (temperature / 2.7255) ** 3
    return k, n * C


def photon_sigma(k, a):
    return min(math.pi * a * a, 8.0 * math.pi / 3.0 * k ** 4 * a ** 6)


def gas(density, temperature=300.0, molecule_mass=28.0 * AMU, speed=5e4):
    k = math.sqrt(3.0 * molecule_mass * K_B * temperature) / HBAR
    return k, density * speed


def geometric_sigma(_k, a):
    return math.pi * a * a


def record(name, description, k, flux, sigma):
    return {
        "name": name,
        "description": description,
        "k": k,
        "flux": flux,
        "sizes": [{"a": a, "sigma_eff": sigma(k, a)} for a in SIZES],
    }


def main():
    sun_k = 2.7 * K_B * 5800.0 / (HBAR * C)
    sun_flux = 0.1361 / 1e-7 / (1.35 * EV)  # W/cm^2 -> erg/(cm^2 s) -> photons
    envs = [
        record("cosmic_background", "blackbody photons at 2.7255 K",
               *thermal_photons(2.7255), photon_sigma),
        record("photons_300K", "blackbody photons at 300 K",
               *thermal_photons(300.0), photon_sigma),
        record("sunlight", "solar photons at Earth, 5800 K spectrum",
               sun_k, sun_flux, photon_sigma),
        record("air", "N2 at 300 K, 2.7e19 cm^-3", *gas(2.7e19), geometric_sigma),
        record("lab_vacuum", "N2 at 300 K, 1e6 cm^-3", *gas(1e6), geometric_sigma),
    ]
    doc = {"units": "cgs", "environments": envs}
    out = pathlib.Path(__file__).with_name("environments.json")
    out.write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
