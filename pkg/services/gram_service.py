"""
Сервис конечных матриц Грама {F(x_i - x_j)} и циклического метода Якоби
"""

import logging
import math
from typing import Callable, Tuple

import numpy as np

from config import Config
from models.gram_spec import GramSpec
from models.hypothesis_report import HypothesisReport
from models.verdict import Classification, Verdict


class GramService:
    """Сборка матрицы Грама и проверка ее положительной полуопределенности"""

    # Сколько точек с наибольшими коэффициентами собственного вектора попадает в свидетеля
    WITNESS_POINTS = 5

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    # ==================== СОБСТВЕННЫЕ ЧИСЛА ====================

    def jacobi_eigen(self, matrix: np.ndarray, sweeps: int = Config.JACOBI_SWEEPS,
                     tol: float = Config.JACOBI_TOL) -> Tuple[np.ndarray, np.ndarray, int, bool]:
        """
        Циклический метод Якоби для симметричной матрицы.

        Args:
            matrix: Симметричная матрица (k, k)
            sweeps: Максимальное число проходов
            tol: Сходимость при ||offdiag||_F < tol * ||M||_F

        Returns:
            (собственные числа, собственные векторы по столбцам, число проходов, сошелся ли)
        """
        a = np.array(matrix, dtype=float)
        k = a.shape[0]
        if a.shape != (k, k):
            raise ValueError("Матрица должна быть квадратной")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(a))))):
            raise ValueError("Матрица должна быть симметричной")
        v = np.eye(k)
        scale = float(np.linalg.norm(a))
        if scale == 0.0 or k == 1:
            return np.diag(a).copy(), v, 0, True

        for sweep in range(1, sweeps + 1):
            off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
            if off < tol * scale:
                return np.diag(a).copy(), v, sweep - 1, True
            for p in range(k - 1):
                for q in range(p + 1, k):
                    apq = a[p, q]
                    if abs(apq) <= 1e-300:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                    c = 1.0 / math.hypot(t, 1.0)
                    s = t * c
                    self._rotate(a, v, p, q, c, s)

        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        converged = off < tol * scale
        if not converged:
            self.logger.warning(f"Якоби не сошелся за {sweeps} проходов: off={off:.3g}, ||M||={scale:.3g}")
        return np.diag(a).copy(), v, sweeps, converged

    @staticmethod
    def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int, c: float, s: float) -> None:
        """A <- P^T A P, V <- V P для вращения в плоскости (p, q)"""
        col_p, col_q = a[:, p].copy(), a[:, q].copy()
        a[:, p] = c * col_p - s * col_q
        a[:, q] = s * col_p + c * col_q
        row_p, row_q = a[p, :].copy(), a[q, :].copy()
        a[p, :] = c * row_p - s * row_q
        a[q, :] = s * row_p + c * row_q
        a[p, q] = a[q, p] = 0.0
        vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
        v[:, p] = c * vec_p - s * vec_q
        v[:, q] = s * vec_p + c * vec_q

    # ==================== МАТРИЦА ГРАМА ====================

    def gram_matrix(self, kernel: Callable[[np.ndarray], np.ndarray], spec: GramSpec) -> np.ndarray:
        """
        M_ij = F(x_i - x_j).

        Raises:
            ValueError: F(0) не конечна или матрица содержит неконечные элементы
        """
        at_zero = float(np.asarray(kernel(np.zeros(spec.dim))))
        if not math.isfinite(at_zero):
            raise ValueError(f"F(0) должна быть конечной, получено {at_zero}")
        diffs = spec.points[:, None, :] - spec.points[None, :, :]
        matrix = np.asarray(kernel(diffs), dtype=float)
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Матрица Грама содержит неконечные элементы")
        return 0.5 * (matrix + matrix.T)

    def gram_test(self, kernel, spec: GramSpec, tol: float = Config.GRAM_TOL) -> Verdict:
        """
        Минимальное собственное число матрицы Грама против -tol * ||M||.

        Args:
            kernel: F на R^n (NormKernel, CosineKernel или любой вызываемый объект)
            spec: Точки
            tol: Относительный допуск

        Returns:
            Verdict; свидетель - собственный вектор lambda_min и его наибольшие координаты
        """
        if getattr(kernel, 'dim', spec.dim) != spec.dim:
            raise ValueError("Размерности ядра и точек не совпадают")
        matrix = self.gram_matrix(kernel, spec)
        eigenvalues, vectors, sweeps, converged = self.jacobi_eigen(matrix)
        scale = float(np.max(np.abs(eigenvalues)))
        tolerance = tol * scale
        index = int(np.argmin(eigenvalues))
        lam_min = float(eigenvalues[index])
        name = getattr(kernel, 'name', 'F')

        details = {'kernel': name, 'matrix_norm': scale, 'sweeps': sweeps, 'converged': converged}
        if spec.coefficients is not None:
            c = spec.coefficients
            details['quadratic_form'] = float(c @ matrix @ c)
        report = HypothesisReport('kernel_finite_at_zero', True,
                                  [(0.0, float(np.asarray(kernel(np.zeros(spec.dim)))))])
        budget = {'points': spec.count, 'sweeps': sweeps}

        if lam_min < -tolerance:
            vector = vectors[:, index]
            top = np.argsort(-np.abs(vector))[:self.WITNESS_POINTS]
            witness = {
                'eigenvalue': lam_min,
                'points': spec.points[top].tolist(),
                'coefficients': vector[top].tolist()
            }
            classification = Classification.VIOLATION_FOUND
        else:
            witness = None
            classification = Classification.POSITIVE_NUMERIC if converged else Classification.INCONCLUSIVE

        self.logger.info(f"Грам {name}: k={spec.count}, lambda_min={lam_min:.3g}, {classification.value}")
        return Verdict('gram', classification, [report], lam_min, witness, tolerance, budget, details)
