"""Reference values frozen from 30-digit mpmath evaluations.

m(s) = sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s)) was
evaluated with mpmath.gamma and mpmath.zeta; the lattice sum uses the
factorization sum_{(m,n) != 0} (m^2 + n^2)^-s = 4 zeta(s) beta(s).
"""

GAMMA_2_5_PLUS_1_5I = 0.309936225840741353308639602361 + 0.734084273621481339419123871284j
ZETA_HALF = -1.46035450880958681288949915252

M_VALUES = {
    2.5: 1.39170509979131149568139934051,
    2.0: 1.74456808213125595235039506434,
    1.5: 2.73686555524041175147353170797,
    0.75: -2.93153399544633043419484151566,
    0.7: -2.29062803953713246955742282841,
    0.3: -0.436561494376044519901047697989,
    0.6 + 0.25j: -0.815912070656270294705524094257 - 1.09469723586094247896530224307j,
    0.6 + 0.2j: -1.00893532691520543416303385858 - 0.972321983848396761380749665823j,
    0.4 - 0.2j: -0.513881841543946081157723418434 + 0.495233538071633245748470840497j,
}

RESIDUE_AT_ONE = 0.954929658551372014613302580235  # 3 / pi

LATTICE_SUM_I_2 = 6.02681203969194012354626019273  # sum over (m, n) != 0 of |m i + n|^-4
E_I_2 = 2.784201545330791222154729853
