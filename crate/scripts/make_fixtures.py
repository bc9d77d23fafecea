#!/usr/bin/env python3
"""Regenerates the NY county fixtures under fixtures/.

Attribute values are synthetic. County names, FIPS codes and the sprawl
label lists are fixed; see fixtures/README.md.
"""

import csv
import json
import random
import struct
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures"

COUNTIES = [
    "Albany", "Allegany", "Bronx", "Broome", "Cattaraugus", "Cayuga", "Chautauqua",
    "Chemung", "Chenango", "Clinton", "Columbia", "Cortland", "Delaware", "Dutchess",
    "Erie", "Essex", "Franklin", "Fulton", "Genesee", "Greene", "Hamilton", "Herkimer",
    "Jefferson", "Kings", "Lewis", "Livingston", "Madison", "Monroe", "Montgomery",
    "Nassau", "New York", "Niagara", "Oneida", "Onondaga", "Ontario", "Orange",
    "Orleans", "Oswego", "Otsego", "Putnam", "Queens", "Rensselaer", "Richmond",
    "Rockland", "St. Lawrence", "Saratoga", "Schenectady", "Schoharie", "Schuyler",
    "Seneca", "Steuben", "Suffolk", "Sullivan", "Tioga", "Tompkins", "Ulster", "Warren",
    "Washington", "Wayne", "Westchester", "Wyoming", "Yates",
]
FIPS = {name: f"36{2 * i + 1:03d}" for i, name in enumerate(COUNTIES)}

SPRAWL_2000 = [
    "Bronx", "Kings", "New York", "Queens", "Richmond", "Nassau", "Suffolk",
    "Westchester", "Rockland", "Erie", "Monroe", "Onondaga", "Albany", "Schenectady",
    "Niagara", "Broome", "Oneida",
]
NEW_IN_2010 = ["Putnam", "Orange", "Dutchess", "Saratoga", "Ulster"]
SPRAWL_2010 = SPRAWL_2000 + NEW_IN_2010

ATTRIBUTES = [
    "PopulationDensity", "TotalPopulation", "TotalPersonalIncome", "Income", "Employed",
    "Unemployed", "FarmLand", "HousingUnits", "ElectricHeating", "MeanTravelTime",
    "TotalAccident", "PublicWaterSupply", "Poverty", "BirthRate", "GasolineStations",
    "TruckTransport", "TransitUse", "Education", "Asians", "WhitePeople", "ForeignBorn",
    "MedianAge", "CommuteByCar", "VacantHousing", "RoadMiles", "RetailEstablishments",
]

UNITS = {
    "PopulationDensity": "per square mile",
    "TotalPopulation": "persons",
    "TotalPersonalIncome": "thousand dollars",
    "Income": "per 1000 population",
    "Employed": "percent of total population",
    "Unemployed": "percent of total population",
    "FarmLand": "acres per square mile",
    "HousingUnits": "housing units",
    "ElectricHeating": "housing units",
    "MeanTravelTime": "minutes",
    "TotalAccident": "reported accidents",
    "PublicWaterSupply": "percent of households",
    "Poverty": "percent of population",
    "BirthRate": "births per 1000 population",
    "GasolineStations": "stations",
    "TruckTransport": "trucks",
    "TransitUse": "percent of commuters",
    "Education": "percent with a degree",
    "Asians": "percent of total population",
    "WhitePeople": "percent of total population",
    "ForeignBorn": "percent of total population",
    "MedianAge": "years",
    "CommuteByCar": "percent of commuters",
    "VacantHousing": "percent of housing units",
    "RoadMiles": "miles",
    "RetailEstablishments": "establishments",
}

# Non-sprawl rows with sprawl-like birth rates / station counts, so those
# attributes do not separate the classes perfectly.
LOW_BIRTH = {("2000", "Essex"), ("2010", "Hamilton")}
FEW_STATIONS = {("2000", "Lewis"), ("2010", "Schuyler")}
# Non-sprawl rows pinned to the top of the non-sprawl density range.
DENSITY_400 = {("2000", "Putnam"), ("2010", "Columbia")}
# Sprawl rows pinned to the bottom of the sprawl density range.
DENSITY_440 = {("2000", "Niagara"), ("2010", "Ulster")}


def row_for(rng, year, name, sprawl):
    key = (year, name)
    r = {}
    if key in DENSITY_400:
        r["PopulationDensity"] = 400
    elif key in DENSITY_440:
        r["PopulationDensity"] = 440
    elif sprawl:
        r["PopulationDensity"] = rng.randint(460, 70000)
    else:
        r["PopulationDensity"] = rng.randint(15, 390)
    r["TotalPopulation"] = rng.randint(5000, 2600000)
    r["TotalPersonalIncome"] = rng.randint(150000, 90000000)
    r["Income"] = round(rng.uniform(10.5, 19.5) if sprawl else rng.uniform(4.0, 9.9), 2)
    r["Employed"] = round(rng.uniform(33.0, 52.0), 2)
    r["Unemployed"] = round(rng.uniform(1.4, 3.2), 3)
    r["FarmLand"] = round(rng.uniform(0.0, 180.0), 1)
    # Non-sprawl rows alternate between mid-size housing stock with little
    # electric heating and small stock with anything.
    if sprawl:
        r["HousingUnits"] = rng.randint(100001, 900000)
        r["ElectricHeating"] = rng.randint(20001, 90000)
    elif COUNTIES.index(name) % 2 == 0:
        r["HousingUnits"] = rng.randint(31000, 99000)
        r["ElectricHeating"] = rng.randint(1000, 19500)
    else:
        r["HousingUnits"] = rng.randint(2500, 29500)
        r["ElectricHeating"] = rng.randint(500, 60000)
    r["MeanTravelTime"] = round(rng.uniform(17.0, 43.0), 1)
    r["TotalAccident"] = rng.randint(100, 60000)
    r["PublicWaterSupply"] = round(rng.uniform(40.0, 99.0), 1)
    r["Poverty"] = round(rng.uniform(6.0, 31.0), 1)
    if sprawl:
        r["BirthRate"] = round(rng.uniform(9.0, 10.9), 2)
    elif key in LOW_BIRTH:
        r["BirthRate"] = round(rng.uniform(9.5, 10.5), 2)
    else:
        r["BirthRate"] = round(rng.uniform(11.5, 15.0), 2)
    if sprawl:
        r["GasolineStations"] = rng.randint(40, 150)
    elif key in FEW_STATIONS:
        r["GasolineStations"] = rng.randint(60, 140)
    else:
        r["GasolineStations"] = rng.randint(200, 900)
    r["TruckTransport"] = rng.randint(200, 240000)
    r["TransitUse"] = round(rng.uniform(0.2, 55.0), 1)
    r["Education"] = round(rng.uniform(14.0, 60.0), 1)
    r["Asians"] = round(rng.uniform(0.2, 23.0), 2)
    r["WhitePeople"] = round(rng.uniform(30.0, 97.0), 2)
    r["ForeignBorn"] = round(rng.uniform(1.0, 46.0), 2)
    r["MedianAge"] = round(rng.uniform(31.0, 47.0), 2)
    r["CommuteByCar"] = round(rng.uniform(20.0, 95.0), 1)
    r["VacantHousing"] = round(rng.uniform(2.0, 40.0), 1)
    r["RoadMiles"] = rng.randint(200, 6000)
    r["RetailEstablishments"] = rng.randint(80, 12000)
    return r


def write_csv(year, sprawl, rng):
    path = OUT / f"ny_{year}.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["FIPS", "Name", *ATTRIBUTES, "Target"])
        for name in COUNTIES:
            y = name in sprawl
            r = row_for(rng, year, name, y)
            w.writerow([FIPS[name], name, *(r[a] for a in ATTRIBUTES), "Y" if y else "N"])


def square(i):
    col, row = i % 8, i // 8
    x, y = -79.8 + col * 0.95, 40.6 + row * 0.55
    d = 0.5
    # clockwise exterior
    return [(x, y), (x, y + d), (x + d, y + d), (x + d, y), (x, y)]


def write_shp():
    rings = [square(i) for i in range(len(COUNTIES))]
    records = b""
    for n, ring in enumerate(rings, start=1):
        xs, ys = [p[0] for p in ring], [p[1] for p in ring]
        content = struct.pack("<i4d", 5, min(xs), min(ys), max(xs), max(ys))
        content += struct.pack("<ii", 1, len(ring)) + struct.pack("<i", 0)
        content += b"".join(struct.pack("<2d", *p) for p in ring)
        records += struct.pack(">ii", n, len(content) // 2) + content
    xs = [p[0] for r in rings for p in r]
    ys = [p[1] for r in rings for p in r]
    header = struct.pack(">7i", 9994, 0, 0, 0, 0, 0, (100 + len(records)) // 2)
    header += struct.pack("<ii", 1000, 5)
    header += struct.pack("<8d", min(xs), min(ys), max(xs), max(ys), 0, 0, 0, 0)
    (OUT / "ny_counties.shp").write_bytes(header + records)


def write_dbf():
    fields = [("GEOID", 5), ("NAME", 24)]
    record_len = 1 + sum(w for _, w in fields)
    header_len = 32 + 32 * len(fields) + 1
    out = struct.pack("<BBBBIHH20x", 0x03, 110, 1, 1, len(COUNTIES), header_len, record_len)
    for name, width in fields:
        out += struct.pack("<11sc4xBB14x", name.encode(), b"C", width, 0)
    out += b"\x0d"
    for county in COUNTIES:
        out += b" " + FIPS[county].encode().ljust(5) + county.encode("latin-1").ljust(24)
    out += b"\x1a"
    (OUT / "ny_counties.dbf").write_bytes(out)


def main():
    OUT.mkdir(exist_ok=True)
    rng = random.Random(2010)
    write_csv("2000", set(SPRAWL_2000), rng)
    write_csv("2010", set(SPRAWL_2010), rng)
    write_shp()
    write_dbf()
    binning = {
        "default": {"strategy": "equal_frequency", "bins": 3},
        "attributes": {
            "Income": {"strategy": "explicit", "cuts": [10]},
            "HousingUnits": {"strategy": "explicit", "cuts": [30000, 100000]},
            "ElectricHeating": {"strategy": "explicit", "cuts": [20000, 50000]},
        },
    }
    (OUT / "ny_binning.json").write_text(json.dumps(binning, indent=2) + "\n")
    (OUT / "ny_units.json").write_text(json.dumps(UNITS, indent=2) + "\n")


if __name__ == "__main__":
    main()
