"""Joint beamforming and IRS phase design for secrecy-rate maximization."""
