"""Matrix zero-range-potential scattering on homonuclear diatomic molecules."""
