# P2P Microgrid Pricing Lab Package
