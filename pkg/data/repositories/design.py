from typing import Union

from data.models.design import ApproximateDesign, ExactDesign


class DesignRepository:
    def load(self, path: str) -> Union[ApproximateDesign, ExactDesign]:
        pass

    def save(self, design: Union[ApproximateDesign, ExactDesign], path: str) -> None:
        pass
