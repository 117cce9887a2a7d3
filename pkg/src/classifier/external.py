"""
External classifier adapter
外部分类器适配器

通过标准输入输出驱动任意外部分类器（例如真正的 CNN）：
    请求（每行一个 JSON）: {"id": <int>, "path": "<图像文件>"}
    响应（每行一个 JSON）: {"id": <int>, "class_index": <int>}
图像以临时 PPM 文件交给子进程，像素裁剪到 [0, 255] 并取整；响应按 id 匹配，顺序不限。
"""

import asyncio
import json
import shlex
import tempfile
from pathlib import Path
from typing import Dict, Optional, Sequence, Set, Union

import numpy as np
from loguru import logger

from image_noise.netpbm import write_netpbm
from stable_noise.errors import ClassifierTimeoutError, ExternalClassifierError, ProtocolError


def parse_response(line: str, pending: Set[int], n_classes: Optional[int] = None):
    """
    解析一行响应

    Returns:
        (id, class_index)
    """
    try:
        message = json.loads(line)
    except json.JSONDecodeError:
        raise ProtocolError(line, "响应不是合法 JSON")
    if not isinstance(message, dict):
        raise ProtocolError(line, "响应必须是 JSON 对象")

    request_id = message.get("id")
    class_index = message.get("class_index")
    for name, value in (("id", request_id), ("class_index", class_index)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise ProtocolError(line, f"字段 {name} 缺失或不是整数")
    if request_id not in pending:
        raise ProtocolError(line, f"未知或重复的 id {request_id}")
    if class_index < 0 or (n_classes is not None and class_index >= n_classes):
        raise ProtocolError(line, f"class_index {class_index} 超出范围")
    return request_id, class_index


class ExternalClassifier:
    """
    外部分类器

    每次 classify 启动 processes 个子进程，图像按下标轮转分片，结果按 id 合并。
    """

    def __init__(self, command: Union[str, Sequence[str]], timeout: float = 30.0,
                 processes: int = 1, n_classes: Optional[int] = None):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ExternalClassifierError("外部分类器命令为空")
        self.timeout = timeout
        self.processes = max(1, processes)
        self.n_classes = n_classes

    def classify(self, images: Sequence[np.ndarray]) -> np.ndarray:
        """同步接口"""
        return asyncio.run(self.classify_async(images))

    async def classify_async(self, images: Sequence[np.ndarray]) -> np.ndarray:
        """异步接口：写临时文件，分片发送请求，按 id 收集结果"""
        if not images:
            return np.empty(0, dtype=np.int64)

        with tempfile.TemporaryDirectory(prefix="stablenoise-") as tmp:
            requests = {}
            for i, image in enumerate(images):
                rgb = np.repeat(image, 3, axis=2) if image.shape[2] == 1 else image
                requests[i] = write_netpbm(Path(tmp) / f"{i:06d}.ppm", rgb)

            shards = [
                {i: requests[i] for i in range(k, len(images), self.processes)}
                for k in range(min(self.processes, len(images)))
            ]
            results: Dict[int, int] = {}
            for part in await asyncio.gather(*(self._run_child(shard) for shard in shards)):
                results.update(part)

        return np.array([results[i] for i in range(len(images))], dtype=np.int64)

    async def _run_child(self, requests: Dict[int, Path]) -> Dict[int, int]:
        proc = await asyncio.create_subprocess_exec(
            *self.command,
            stdin=asyncio.subprocess.PIPE,
            stdout=asyncio.subprocess.PIPE,
            stderr=asyncio.subprocess.PIPE,
        )
        stderr_task = asyncio.create_task(proc.stderr.read())

        async def feed():
            try:
                for request_id, path in requests.items():
                    line = json.dumps({"id": request_id, "path": str(path)}) + "\n"
                    proc.stdin.write(line.encode("utf-8"))
                    await proc.stdin.drain()
                proc.stdin.close()
            except (BrokenPipeError, ConnectionResetError):
                logger.debug("外部分类器提前关闭了标准输入")

        writer = asyncio.create_task(feed())
        pending = set(requests)
        results: Dict[int, int] = {}
        try:
            while pending:
                raw = await asyncio.wait_for(proc.stdout.readline(), self.timeout)
                if not raw:
                    await proc.wait()
                    stderr = (await stderr_task).decode("utf-8", "replace").strip()
                    raise ExternalClassifierError(
                        f"外部分类器在 {len(pending)} 个请求未应答时退出 (exit={proc.returncode}): {stderr}"
                    )
                request_id, class_index = parse_response(raw.decode("utf-8").strip(), pending, self.n_classes)
                pending.discard(request_id)
                results[request_id] = class_index

            await writer
            returncode = await asyncio.wait_for(proc.wait(), self.timeout)
            if returncode != 0:
                stderr = (await stderr_task).decode("utf-8", "replace").strip()
                raise ExternalClassifierError(f"外部分类器退出码非零 ({returncode}): {stderr}")
            return results
        except asyncio.TimeoutError:
            raise ClassifierTimeoutError(f"外部分类器 {self.timeout}s 内无响应: {' '.join(self.command)}")
        finally:
            writer.cancel()
            if proc.returncode is None:
                proc.kill()
                await proc.wait()
            if not stderr_task.done():
                stderr_task.cancel()


def create_external_classifier(command: Union[str, Sequence[str]], timeout: float = 30.0,
                               processes: int = 1, n_classes: Optional[int] = None) -> ExternalClassifier:
    """
    创建外部分类器实例

    Args:
        command: 子进程命令行
        timeout: 单行响应的超时秒数
        processes: 并行子进程数
        n_classes: 类别数，给定时校验 class_index 范围

    Returns:
        外部分类器实例
    """
    return ExternalClassifier(command, timeout, processes, n_classes)
