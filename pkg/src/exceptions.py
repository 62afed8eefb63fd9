"""sensornet の例外定義。

各例外は CLI の終了コード (`exit_code`) を持ちます。
1: 設定エラー, 2: 数値許容誤差エラー, 3: ケース条件違反。
"""


class SensorNetError(Exception):
    """全ての sensornet 例外の基底クラス。"""
    exit_code = 1


# --- 設定・入力エラー (exit 1) ---
class ConfigInvalid(SensorNetError):
    pass


class IndexOutOfRange(SensorNetError):
    pass


class DimensionMismatch(SensorNetError):
    pass


class NonPositiveInput(SensorNetError):
    pass


class InvalidResourceCount(SensorNetError):
    pass


class InvalidDistribution(SensorNetError):
    pass


class StepTooSmall(SensorNetError):
    pass


class DimensionTooLarge(SensorNetError):
    pass


class UnknownPlatform(SensorNetError):
    pass


# --- 数値エラー (exit 2) ---
class NumericalError(SensorNetError):
    exit_code = 2


class ToleranceFailure(NumericalError):
    pass


class TruncationInsufficient(NumericalError):
    pass


class NotConverged(NumericalError):
    pass


class AmbiguousLikelihood(NumericalError):
    pass


class SingularBeta(NumericalError):
    pass


# --- ケース条件違反 (exit 3) ---
class CaseConditionViolated(SensorNetError):
    exit_code = 3
