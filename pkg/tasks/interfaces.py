import abc


class StorageInterface(abc.ABC):
    """
    Interface to abstract the interaction with the place where run outputs
    are written.
    """

    @abc.abstractmethod
    def get_content(self, file_key: str) -> str:
        """
        Read back the content stored under the given file key
        """

    @abc.abstractmethod
    def upload_content(self, file_key: str, content_to_be_uploaded: str) -> None:
        """
        Store the given content under the given file key
        """
