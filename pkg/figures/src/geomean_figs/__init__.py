"""Figure scripts for the geomean solver outputs."""
