"""
并行执行支持。

参数抽样之间互不依赖，用线程池分发；结果按提交顺序返回，
单个任务的异常与超时都转成错误记录而不是向上抛出。
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, TimeoutError, as_completed
from dataclasses import dataclass
from typing import Any, Callable, Generic, Sequence, TypeVar

from qvariant.analysis.constants import DEFAULT_DRAW_TIMEOUT, DEFAULT_MAX_WORKERS
from qvariant.analysis.errors import QVariantError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class TaskResult(Generic[R]):
    """单个任务的结果"""

    index: int
    value: R | None = None
    error: str | None = None
    error_type: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_one(index: int, task: Any, fn: Callable[[Any], Any]) -> TaskResult:
    try:
        return TaskResult(index, value=fn(task))
    except QVariantError as e:
        logger.warning(f"任务 {index} 失败: {e}")
        return TaskResult(index, error=str(e), error_type=type(e).__name__)
    except Exception as e:  # noqa: BLE001
        logger.error(f"任务 {index} 异常: {e}")
        return TaskResult(index, error=str(e), error_type=type(e).__name__)


def run_parallel(
    tasks: Sequence[T],
    fn: Callable[[T], R],
    max_workers: int = DEFAULT_MAX_WORKERS,
    timeout: float = DEFAULT_DRAW_TIMEOUT,
) -> list[TaskResult[R]]:
    """
    并行执行 fn(task)。

    Args:
        tasks: 任务列表
        fn: 对单个任务求值的纯函数
        max_workers: 最大并行数，<= 1 时顺序执行
        timeout: 总超时时间（秒）

    Returns:
        与 tasks 等长、按原始顺序排列的 TaskResult 列表
    """
    if not tasks:
        return []

    # 单个任务或单线程直接执行
    if len(tasks) == 1 or max_workers <= 1:
        return [_run_one(i, task, fn) for i, task in enumerate(tasks)]

    results: dict[int, TaskResult[R]] = {}
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(_run_one, i, task, fn): i
            for i, task in enumerate(tasks)
        }
        try:
            for future in as_completed(future_to_index, timeout=timeout):
                index = future_to_index[future]
                results[index] = future.result()
        except TimeoutError:
            # 超时: 保留已完成的结果，未完成的标记为超时
            logger.warning(f"并行执行超时 ({timeout}s)")
            for future, index in future_to_index.items():
                if index not in results:
                    future.cancel()
                    results[index] = TaskResult(
                        index, error=f"执行超时 ({timeout}s)", error_type="TimeoutError"
                    )

    return [results[i] for i in range(len(tasks))]
