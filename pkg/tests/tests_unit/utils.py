from _levybsde.levy_measures import CGMY, Atomic, AtomicRule, MertonJump

CGMY_HALF = CGMY(C=1.0, G=5.0, M=5.0, Y=0.5)
MERTON = MertonJump(intensity=1.0, mu=0.0, sigma=1.0)
HARMONIC = Atomic(rule=AtomicRule.harmonic)
LOGHARMONIC = Atomic(rule=AtomicRule.logharmonic)

# small sizes that keep the unit suite fast
FAST_PATHS = 2_000
FAST_LEVELS = [2, 4, 8, 16]
