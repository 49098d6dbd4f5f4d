"""
analysis 模块的常量配置。

集中管理精度、容差、截断与抽样参数。
"""

# ==================== 精度配置 ====================
# 单个有理数允许的最大位数 (分子 + 分母)
DEFAULT_BIT_LIMIT = 1_000_000

# float 模式残差容差 (相对最大项)
DEFAULT_TOLERANCE = 1e-10

# float 模式共振检测的相对容差
RESONANCE_RTOL = 1e-8

# 由特征根反求指数时 |twice_value| 的搜索上限
MAX_EXPONENT_TWICE = 4096

# Laurent 级数默认相对精度 (项数)
LAURENT_PRECISION = 32


# ==================== 截断配置 ====================
# 默认截断阶
DEFAULT_TRUNCATION = 10

# Appell 双重级数边界带宽 (m+n 距 M 的距离)
APPELL_BOUNDARY_BAND = 3


# ==================== 抽样配置 ====================
# 半整数参数范围 [-4, 4]，步长 1/2
HALF_INT_RANGE = (-8, 8)

# t 参数分子/分母上限
T_MAX_NUMERATOR = 9

# 单次抽样最大重试次数
MAX_DRAW_ATTEMPTS = 200

# 默认并行线程数
DEFAULT_MAX_WORKERS = 4

# 单个 draw 的超时 (秒)
DEFAULT_DRAW_TIMEOUT = 600.0


# ==================== 极限配置 ====================
# t3 -> inf 浮点拟合使用的 10^k
T3_POWERS = (2, 3, 4, 5, 6)

# 相邻两点 gap 至少缩小此倍数才计入拟合；之后视为舍入噪声平台
LIMIT_FLOOR_RATIO = 2.0

# q -> 1 连续极限的默认 epsilon 网格
DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3)

# 连续极限比较的 x 采样点数
ODE_GRID_POINTS = 10


# ==================== 输出配置 ====================
REPORT_SCHEMA = "qvariant.report/1"
SERIES_SCHEMA = "qvariant.series/1"
