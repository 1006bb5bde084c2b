"""
Random-access simulator client

Thin HTTP client for the simulator API: closed-form evaluation, the RAR codec
and small Monte-Carlo runs.
"""

import httpx
from typing import Optional, Dict, Any, List
from dataclasses import dataclass


@dataclass
class RarFrameResult:
    """Result of a RAR encode or decode call"""
    success: bool
    hex: Optional[str] = None
    status: Optional[str] = None
    ta: Optional[int] = None
    rb_start: Optional[int] = None
    num_rb: Optional[int] = None
    error: Optional[str] = None


class RaSimClient:
    """Client for the random-access simulator service"""

    def __init__(
        self,
        base_url: str = "http://localhost:8010",
        timeout: float = 120.0,
        http_client: Optional[httpx.Client] = None
    ):
        """
        Initialize the client

        Args:
            base_url: Base URL of the service
            timeout: Request timeout in seconds (campaign runs can be slow)
            http_client: Pre-built httpx client, e.g. one with a mock transport
        """
        self.base_url = base_url.rstrip('/')
        self.timeout = timeout
        self.client = http_client or httpx.Client(timeout=timeout)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def close(self):
        """Close the HTTP client"""
        self.client.close()

    @staticmethod
    def _error(response: httpx.Response) -> str:
        try:
            detail = response.json().get("detail", "Unknown error")
        except ValueError:
            return response.text or "Unknown error"
        return detail if isinstance(detail, str) else str(detail)

    def health_check(self) -> Dict[str, Any]:
        response = self.client.get(f"{self.base_url}/health")
        response.raise_for_status()
        return response.json()

    def get_params(self) -> Dict[str, Any]:
        """Derived parameters of the profile the service loaded"""
        response = self.client.get(f"{self.base_url}/api/params")
        response.raise_for_status()
        return response.json()["params"]

    def analytic(
        self,
        m: float,
        k_g: int = 2,
        e_u: float = 0.0913,
        e_t: float = 0.0913,
        epsilon_db: float = -3.0
    ) -> Dict[str, Any]:
        """
        Closed-form SINR and minimum antenna count

        Returns:
            Response body; raises httpx.HTTPStatusError on rejected input
        """
        payload = {"m": m, "k_g": k_g, "e_u": e_u, "e_t": e_t, "epsilon_db": epsilon_db}
        response = self.client.post(f"{self.base_url}/api/analytic", json=payload)
        response.raise_for_status()
        return response.json()

    def encode_rar(self, ta: int, rb_start: int = 0, num_rb: int = 1) -> RarFrameResult:
        response = self.client.post(
            f"{self.base_url}/api/codec/encode",
            json={"ta": ta, "rb_start": rb_start, "num_rb": num_rb}
        )
        if response.status_code == 200:
            data = response.json()
            return RarFrameResult(success=True, hex=data["hex"])
        return RarFrameResult(success=False, error=self._error(response))

    def decode_rar(self, frame_hex: str) -> RarFrameResult:
        response = self.client.post(
            f"{self.base_url}/api/codec/decode",
            json={"frame_hex": frame_hex}
        )
        if response.status_code == 200:
            data = response.json()
            return RarFrameResult(
                success=data["status"] == "success",
                hex=frame_hex,
                status=data["status"],
                ta=data.get("ta"),
                rb_start=data.get("rb_start"),
                num_rb=data.get("num_rb")
            )
        return RarFrameResult(success=False, error=self._error(response))

    def simulate(
        self,
        num_frames: int,
        mean_requests: Optional[float] = None,
        seed: Optional[int] = None,
        overrides: Optional[List[str]] = None
    ) -> Dict[str, Any]:
        """
        Run a small campaign on the server

        Args:
            num_frames: Frames to simulate
            mean_requests: Poisson mean of new requests per frame
            seed: Master seed (server default when omitted)
            overrides: section.key=value profile overrides

        Returns:
            Response body with the campaign row
        """
        payload: Dict[str, Any] = {"num_frames": num_frames, "overrides": overrides or []}
        if mean_requests is not None:
            payload["mean_requests"] = mean_requests
        if seed is not None:
            payload["seed"] = seed
        response = self.client.post(f"{self.base_url}/api/simulate", json=payload)
        response.raise_for_status()
        return response.json()

    def pf_pd(
        self,
        trials: int,
        m: Optional[int] = None,
        kappa: Optional[float] = None,
        seed: Optional[int] = None
    ) -> Dict[str, Any]:
        payload = {"trials": trials, "m": m, "kappa": kappa, "seed": seed}
        response = self.client.post(
            f"{self.base_url}/api/pf-pd",
            json={k: v for k, v in payload.items() if v is not None}
        )
        response.raise_for_status()
        return response.json()
